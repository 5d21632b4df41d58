#include "sentra/journal.hpp"

#include <sqlite3.h>

#include "sentra/decimal.hpp"
#include "sentra/errors.hpp"

namespace sentra {

namespace {

constexpr int kSchemaVersion = 1;

std::optional<double> col_opt_double(sqlite3_stmt* s, int i) {
    if (sqlite3_column_type(s, i) == SQLITE_NULL) return std::nullopt;
    return sqlite3_column_double(s, i);
}

std::optional<Scaled> col_opt_scaled(sqlite3_stmt* s, int i) {
    if (sqlite3_column_type(s, i) == SQLITE_NULL) return std::nullopt;
    return sqlite3_column_int64(s, i);
}

std::string col_text(sqlite3_stmt* s, int i) {
    const unsigned char* t = sqlite3_column_text(s, i);
    return t ? reinterpret_cast<const char*>(t) : "";
}

}  // namespace

// Minimal RAII wrapper over a prepared statement.
struct Journal::Stmt {
    sqlite3_stmt* stmt = nullptr;

    Stmt(sqlite3* db, const char* sql) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt, nullptr) != SQLITE_OK) {
            throw StorageError(std::string("prepare failed: ") + sqlite3_errmsg(db));
        }
    }
    ~Stmt() { sqlite3_finalize(stmt); }

    Stmt& bind(int i, std::int64_t v) {
        sqlite3_bind_int64(stmt, i, v);
        return *this;
    }
    Stmt& bind(int i, double v) {
        sqlite3_bind_double(stmt, i, v);
        return *this;
    }
    Stmt& bind(int i, const std::string& v) {
        sqlite3_bind_text(stmt, i, v.c_str(), -1, SQLITE_TRANSIENT);
        return *this;
    }
    Stmt& bind_null(int i) {
        sqlite3_bind_null(stmt, i);
        return *this;
    }
    bool step() {
        int rc = sqlite3_step(stmt);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw StorageError(std::string("step failed: ") + sqlite3_errstr(rc));
    }
};

Journal::Journal(const std::string& path) : path_(path) {
    if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        if (db_) sqlite3_close(db_);
        db_ = nullptr;
        throw StorageError("cannot open journal at '" + path + "': " + msg);
    }
    sqlite3_busy_timeout(db_, 10000);
    // WAL with synchronous=FULL: a committed append survives process death.
    exec("PRAGMA journal_mode=WAL;");
    exec("PRAGMA synchronous=FULL;");
    exec("PRAGMA foreign_keys=ON;");
    migrate();
}

Journal::~Journal() {
    if (db_) sqlite3_close(db_);
}

void Journal::close() {
    std::lock_guard<std::mutex> lk(mu_);
    if (db_) {
        sqlite3_close(db_);
        db_ = nullptr;
    }
}

bool Journal::is_open() const {
    std::lock_guard<std::mutex> lk(mu_);
    return db_ != nullptr;
}

void Journal::ensure_open() const {
    if (!db_) throw StorageError("journal is closed");
}

void Journal::exec(const std::string& sql) {
    ensure_open();
    char* err = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw StorageError("exec failed: " + msg + " [" + sql + "]");
    }
}

void Journal::migrate() {
    exec(
        "CREATE TABLE IF NOT EXISTS migrations ("
        " version INTEGER PRIMARY KEY, applied_at INTEGER NOT NULL);");
    exec(
        "CREATE TABLE IF NOT EXISTS meta ("
        " key TEXT PRIMARY KEY, value TEXT NOT NULL);");
    exec(
        "CREATE TABLE IF NOT EXISTS trades ("
        " id INTEGER PRIMARY KEY AUTOINCREMENT,"
        " asset TEXT NOT NULL,"
        " opened_at INTEGER NOT NULL,"
        " closed_at INTEGER,"
        " signal TEXT NOT NULL,"
        " confidence_e8 INTEGER NOT NULL,"
        " entry_e8 INTEGER NOT NULL,"
        " sl_e8 INTEGER NOT NULL,"
        " tp_e8 INTEGER NOT NULL,"
        " size_usd_e8 INTEGER NOT NULL,"
        " analyst_reasoning TEXT NOT NULL,"
        " negotiation_summary TEXT NOT NULL,"
        " omega_e8 INTEGER NOT NULL,"
        " rho_cb_e8 INTEGER NOT NULL,"
        " z REAL,"
        " pnl_usd_e8 INTEGER,"
        " close_reason TEXT,"
        " invocation_id TEXT NOT NULL);");
    exec(
        "CREATE TABLE IF NOT EXISTS vol_history ("
        " asset TEXT NOT NULL,"
        " timestamp INTEGER NOT NULL,"
        " r REAL,"
        " price REAL NOT NULL,"
        " PRIMARY KEY (asset, timestamp));");
    exec(
        "CREATE TABLE IF NOT EXISTS pipeline_log ("
        " seq INTEGER PRIMARY KEY AUTOINCREMENT,"
        " timestamp INTEGER NOT NULL,"
        " invocation_id TEXT,"
        " kind TEXT NOT NULL,"
        " payload TEXT NOT NULL);");
    exec(
        "CREATE TABLE IF NOT EXISTS inference_calls ("
        " invocation_id TEXT NOT NULL,"
        " role TEXT NOT NULL,"
        " started_at INTEGER NOT NULL,"
        " ended_at INTEGER NOT NULL,"
        " outcome TEXT NOT NULL,"
        " request_bytes INTEGER NOT NULL,"
        " response_bytes INTEGER NOT NULL);");

    Stmt check(db_, "SELECT COUNT(*) FROM migrations WHERE version = ?1;");
    check.bind(1, static_cast<std::int64_t>(kSchemaVersion));
    check.step();
    if (sqlite3_column_int64(check.stmt, 0) == 0) {
        Stmt ins(db_, "INSERT INTO migrations (version, applied_at) VALUES (?1, strftime('%s','now'));");
        ins.bind(1, static_cast<std::int64_t>(kSchemaVersion));
        ins.step();
    }
}

void Journal::upsert_vol(const VolRow& row) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_,
           "INSERT INTO vol_history (asset, timestamp, r, price) VALUES (?1, ?2, ?3, ?4)"
           " ON CONFLICT(asset, timestamp) DO UPDATE SET r = excluded.r, price = excluded.price;");
    s.bind(1, row.asset).bind(2, row.timestamp);
    if (row.r) s.bind(3, *row.r); else s.bind_null(3);
    s.bind(4, row.price);
    s.step();
}

void Journal::upsert_vol_batch(const std::vector<VolRow>& rows) {
    if (rows.empty()) return;
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    exec("BEGIN IMMEDIATE;");
    try {
        Stmt s(db_,
               "INSERT INTO vol_history (asset, timestamp, r, price) VALUES (?1, ?2, ?3, ?4)"
               " ON CONFLICT(asset, timestamp) DO UPDATE SET r = excluded.r, price = excluded.price;");
        for (const auto& row : rows) {
            sqlite3_reset(s.stmt);
            sqlite3_clear_bindings(s.stmt);
            s.bind(1, row.asset).bind(2, row.timestamp);
            if (row.r) s.bind(3, *row.r); else s.bind_null(3);
            s.bind(4, row.price);
            s.step();
        }
    } catch (...) {
        exec("ROLLBACK;");
        throw;
    }
    exec("COMMIT;");
}

std::int64_t Journal::open_trade(const TradeOpenRow& row) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_,
           "INSERT INTO trades (asset, opened_at, signal, confidence_e8, entry_e8, sl_e8, tp_e8,"
           " size_usd_e8, analyst_reasoning, negotiation_summary, omega_e8, rho_cb_e8, z,"
           " invocation_id)"
           " VALUES (?1,?2,?3,?4,?5,?6,?7,?8,?9,?10,?11,?12,?13,?14);");
    s.bind(1, row.asset)
        .bind(2, row.opened_at)
        .bind(3, std::string(signal_name(row.signal)))
        .bind(4, to_scaled(row.confidence))
        .bind(5, to_scaled(row.entry))
        .bind(6, to_scaled(row.stop_loss))
        .bind(7, to_scaled(row.take_profit))
        .bind(8, to_scaled(row.size_usd))
        .bind(9, row.analyst_reasoning)
        .bind(10, row.negotiation_summary)
        .bind(11, to_scaled(row.omega))
        .bind(12, to_scaled(row.rho_cb));
    if (row.z) s.bind(13, *row.z); else s.bind_null(13);
    s.bind(14, row.invocation_id);
    s.step();
    return sqlite3_last_insert_rowid(db_);
}

void Journal::close_trade(std::int64_t trade_id, Timestamp closed_at, double pnl_usd,
                          const std::string& close_reason) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_,
           "UPDATE trades SET closed_at = ?1, pnl_usd_e8 = ?2, close_reason = ?3 WHERE id = ?4;");
    s.bind(1, closed_at).bind(2, to_scaled(pnl_usd)).bind(3, close_reason).bind(4, trade_id);
    s.step();
    if (sqlite3_changes(db_) != 1) throw StorageError("close_trade: unknown trade id");
}

std::int64_t Journal::append_log(Timestamp ts, const std::optional<std::string>& invocation_id,
                                 const std::string& kind, const nlohmann::json& payload) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_,
           "INSERT INTO pipeline_log (timestamp, invocation_id, kind, payload)"
           " VALUES (?1, ?2, ?3, ?4);");
    s.bind(1, ts);
    if (invocation_id) s.bind(2, *invocation_id); else s.bind_null(2);
    s.bind(3, kind).bind(4, payload.dump());
    s.step();
    return sqlite3_last_insert_rowid(db_);
}

void Journal::append_inference(const InferenceCallRow& row) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_,
           "INSERT INTO inference_calls (invocation_id, role, started_at, ended_at, outcome,"
           " request_bytes, response_bytes) VALUES (?1,?2,?3,?4,?5,?6,?7);");
    s.bind(1, row.invocation_id)
        .bind(2, row.role)
        .bind(3, row.started_at)
        .bind(4, row.ended_at)
        .bind(5, row.outcome)
        .bind(6, row.request_bytes)
        .bind(7, row.response_bytes);
    s.step();
}

void Journal::meta_set(const std::string& key, const std::string& value) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_,
           "INSERT INTO meta (key, value) VALUES (?1, ?2)"
           " ON CONFLICT(key) DO UPDATE SET value = excluded.value;");
    s.bind(1, key).bind(2, value);
    s.step();
}

std::optional<std::string> Journal::meta_get(const std::string& key) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, "SELECT value FROM meta WHERE key = ?1;");
    s.bind(1, key);
    if (!s.step()) return std::nullopt;
    return col_text(s.stmt, 0);
}

std::vector<std::string> Journal::vol_assets() {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, "SELECT DISTINCT asset FROM vol_history ORDER BY asset;");
    std::vector<std::string> out;
    while (s.step()) out.push_back(col_text(s.stmt, 0));
    return out;
}

std::vector<VolRow> Journal::recent_vol(const std::string& asset, int limit) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_,
           "SELECT asset, timestamp, r, price FROM ("
           "  SELECT * FROM vol_history WHERE asset = ?1 ORDER BY timestamp DESC LIMIT ?2)"
           " ORDER BY timestamp ASC;");
    s.bind(1, asset).bind(2, static_cast<std::int64_t>(limit));
    std::vector<VolRow> out;
    while (s.step()) {
        VolRow r;
        r.asset = col_text(s.stmt, 0);
        r.timestamp = sqlite3_column_int64(s.stmt, 1);
        r.r = col_opt_double(s.stmt, 2);
        r.price = sqlite3_column_double(s.stmt, 3);
        out.push_back(std::move(r));
    }
    return out;
}

std::int64_t Journal::vol_count() {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, "SELECT COUNT(*) FROM vol_history;");
    s.step();
    return sqlite3_column_int64(s.stmt, 0);
}

namespace {

sentra::TradeRow read_trade(sqlite3_stmt* st) {
    TradeRow t;
    t.id = sqlite3_column_int64(st, 0);
    t.asset = col_text(st, 1);
    t.opened_at = sqlite3_column_int64(st, 2);
    if (sqlite3_column_type(st, 3) != SQLITE_NULL) t.closed_at = sqlite3_column_int64(st, 3);
    t.signal = signal_from_string(col_text(st, 4)).value_or(Signal::Wait);
    t.confidence = from_scaled(sqlite3_column_int64(st, 5));
    t.entry = from_scaled(sqlite3_column_int64(st, 6));
    t.stop_loss = from_scaled(sqlite3_column_int64(st, 7));
    t.take_profit = from_scaled(sqlite3_column_int64(st, 8));
    t.size_usd = from_scaled(sqlite3_column_int64(st, 9));
    t.analyst_reasoning = col_text(st, 10);
    t.negotiation_summary = col_text(st, 11);
    t.omega = from_scaled(sqlite3_column_int64(st, 12));
    t.rho_cb = from_scaled(sqlite3_column_int64(st, 13));
    t.z = col_opt_double(st, 14);
    if (auto p = col_opt_scaled(st, 15)) t.pnl_usd = from_scaled(*p);
    t.close_reason = col_text(st, 16);
    t.invocation_id = col_text(st, 17);
    return t;
}

constexpr const char* kTradeCols =
    "id, asset, opened_at, closed_at, signal, confidence_e8, entry_e8, sl_e8, tp_e8,"
    " size_usd_e8, analyst_reasoning, negotiation_summary, omega_e8, rho_cb_e8, z,"
    " pnl_usd_e8, close_reason, invocation_id";

}  // namespace

std::vector<TradeRow> Journal::trades() {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, ("SELECT " + std::string(kTradeCols) + " FROM trades ORDER BY id;").c_str());
    std::vector<TradeRow> out;
    while (s.step()) out.push_back(read_trade(s.stmt));
    return out;
}

std::vector<TradeRow> Journal::open_trades() {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, ("SELECT " + std::string(kTradeCols) +
                 " FROM trades WHERE closed_at IS NULL ORDER BY id;")
                    .c_str());
    std::vector<TradeRow> out;
    while (s.step()) out.push_back(read_trade(s.stmt));
    return out;
}

std::vector<TradeRow> Journal::recent_closed_trades(const std::string& asset, int k) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, ("SELECT " + std::string(kTradeCols) +
                 " FROM trades WHERE asset = ?1 AND closed_at IS NOT NULL"
                 " ORDER BY closed_at DESC, id DESC LIMIT ?2;")
                    .c_str());
    s.bind(1, asset).bind(2, static_cast<std::int64_t>(k));
    std::vector<TradeRow> out;
    while (s.step()) out.push_back(read_trade(s.stmt));
    return out;
}

std::vector<LogRow> Journal::log_rows() {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, "SELECT seq, timestamp, invocation_id, kind, payload FROM pipeline_log ORDER BY seq;");
    std::vector<LogRow> out;
    while (s.step()) {
        LogRow r;
        r.seq = sqlite3_column_int64(s.stmt, 0);
        r.timestamp = sqlite3_column_int64(s.stmt, 1);
        if (sqlite3_column_type(s.stmt, 2) != SQLITE_NULL) r.invocation_id = col_text(s.stmt, 2);
        r.kind = col_text(s.stmt, 3);
        r.payload = col_text(s.stmt, 4);
        out.push_back(std::move(r));
    }
    return out;
}

std::int64_t Journal::count_log_kind(const std::string& kind) {
    std::lock_guard<std::mutex> lk(mu_);
    ensure_open();
    Stmt s(db_, "SELECT COUNT(*) FROM pipeline_log WHERE kind = ?1;");
    s.bind(1, kind);
    s.step();
    return sqlite3_column_int64(s.stmt, 0);
}

void Journal::export_session(std::ostream& out) {
    // nlohmann::json orders object keys lexicographically, which gives the
    // sorted-key canonical form directly.
    for (const auto& t : trades()) {
        nlohmann::json j;
        j["table"] = "trades";
        j["id"] = t.id;
        j["asset"] = t.asset;
        j["opened_at"] = t.opened_at;
        if (t.closed_at) j["closed_at"] = *t.closed_at; else j["closed_at"] = nullptr;
        j["signal"] = signal_name(t.signal);
        j["confidence"] = format_fixed(t.confidence);
        j["entry"] = format_fixed(t.entry);
        j["stop_loss"] = format_fixed(t.stop_loss);
        j["take_profit"] = format_fixed(t.take_profit);
        j["size_usd"] = format_fixed(t.size_usd);
        j["analyst_reasoning"] = t.analyst_reasoning;
        j["negotiation_summary"] = t.negotiation_summary;
        j["omega"] = format_fixed(t.omega);
        j["rho_cb"] = format_fixed(t.rho_cb);
        if (t.z) j["z"] = format_exact(*t.z); else j["z"] = nullptr;
        if (t.pnl_usd) j["pnl_usd"] = format_fixed(*t.pnl_usd); else j["pnl_usd"] = nullptr;
        j["close_reason"] = t.close_reason;
        j["invocation_id"] = t.invocation_id;
        out << j.dump() << "\n";
    }
    {
        std::lock_guard<std::mutex> lk(mu_);
        ensure_open();
        Stmt s(db_, "SELECT asset, timestamp, r, price FROM vol_history ORDER BY asset, timestamp;");
        while (s.step()) {
            nlohmann::json j;
            j["table"] = "vol_history";
            j["asset"] = col_text(s.stmt, 0);
            j["timestamp"] = sqlite3_column_int64(s.stmt, 1);
            if (sqlite3_column_type(s.stmt, 2) != SQLITE_NULL)
                j["r"] = format_exact(sqlite3_column_double(s.stmt, 2));
            else
                j["r"] = nullptr;
            j["price"] = format_exact(sqlite3_column_double(s.stmt, 3));
            out << j.dump() << "\n";
        }
    }
    for (const auto& r : log_rows()) {
        nlohmann::json j;
        j["table"] = "pipeline_log";
        j["seq"] = r.seq;
        j["timestamp"] = r.timestamp;
        if (r.invocation_id) j["invocation_id"] = *r.invocation_id; else j["invocation_id"] = nullptr;
        j["kind"] = r.kind;
        j["payload"] = nlohmann::json::parse(r.payload);
        out << j.dump() << "\n";
    }
    {
        std::lock_guard<std::mutex> lk(mu_);
        ensure_open();
        Stmt s(db_,
               "SELECT invocation_id, role, started_at, ended_at, outcome, request_bytes,"
               " response_bytes FROM inference_calls ORDER BY rowid;");
        while (s.step()) {
            nlohmann::json j;
            j["table"] = "inference_calls";
            j["invocation_id"] = col_text(s.stmt, 0);
            j["role"] = col_text(s.stmt, 1);
            j["started_at"] = sqlite3_column_int64(s.stmt, 2);
            j["ended_at"] = sqlite3_column_int64(s.stmt, 3);
            j["outcome"] = col_text(s.stmt, 4);
            j["request_bytes"] = sqlite3_column_int64(s.stmt, 5);
            j["response_bytes"] = sqlite3_column_int64(s.stmt, 6);
            out << j.dump() << "\n";
        }
    }
}

}  // namespace sentra
