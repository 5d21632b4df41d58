#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentra/types.hpp"

struct sqlite3;

namespace sentra {

// Row models mirror the persisted schema. Money-like fields are stored as
// 1e-8 scaled integers; vol_history keeps raw IEEE doubles so a hot restart
// reproduces the in-memory window bit-exactly.

struct VolRow {
    std::string asset;
    Timestamp timestamp = 0;
    std::optional<double> r;  // absent for the first observation of an asset
    double price = 0.0;
};

struct TradeOpenRow {
    std::string asset;
    Timestamp opened_at = 0;
    Signal signal = Signal::Long;
    double confidence = 0.0;
    double entry = 0.0;
    double stop_loss = 0.0;
    double take_profit = 0.0;
    double size_usd = 0.0;
    std::string analyst_reasoning;
    std::string negotiation_summary;
    double omega = 0.0;
    double rho_cb = 0.0;
    std::optional<double> z;
    std::string invocation_id;
};

struct TradeRow {
    std::int64_t id = 0;
    std::string asset;
    Timestamp opened_at = 0;
    std::optional<Timestamp> closed_at;
    Signal signal = Signal::Long;
    double confidence = 0.0;
    double entry = 0.0;
    double stop_loss = 0.0;
    double take_profit = 0.0;
    double size_usd = 0.0;
    std::string analyst_reasoning;
    std::string negotiation_summary;
    double omega = 0.0;
    double rho_cb = 0.0;
    std::optional<double> z;
    std::optional<double> pnl_usd;
    std::string close_reason;  // tp | sl | force_closed, empty while open
    std::string invocation_id;
};

struct LogRow {
    std::int64_t seq = 0;
    Timestamp timestamp = 0;
    std::optional<std::string> invocation_id;
    std::string kind;
    std::string payload;  // canonical JSON (sorted keys)
};

struct InferenceCallRow {
    std::string invocation_id;
    std::string role;  // analyst | risk_manager
    Timestamp started_at = 0;
    Timestamp ended_at = 0;
    std::string outcome;  // ok | schema_violation | timeout
    std::int64_t request_bytes = 0;
    std::int64_t response_bytes = 0;
};

// Pipeline audit event kinds written to pipeline_log.
namespace event {
inline constexpr const char* kSessionStart = "session_start";
inline constexpr const char* kSessionEnd = "session_end";
inline constexpr const char* kPipelineStart = "pipeline_start";
inline constexpr const char* kPipelineBusy = "pipeline_busy";
inline constexpr const char* kCooldownActive = "cooldown_active";
inline constexpr const char* kAssetCooldown = "asset_cooldown";
inline constexpr const char* kPipelineComplete = "pipeline_complete";
inline constexpr const char* kForcedRelease = "forced_release";
inline constexpr const char* kProtocolViolation = "protocol_violation";
inline constexpr const char* kStageAnalyst = "stage_analyst";
inline constexpr const char* kStageGates = "stage_gates";
inline constexpr const char* kStageRisk = "stage_risk";
inline constexpr const char* kStageExecution = "stage_execution";
inline constexpr const char* kTradeClose = "trade_close";
inline constexpr const char* kTransportError = "transport_error";
inline constexpr const char* kTickRejected = "tick_rejected";
inline constexpr const char* kSafetyCheck = "safety_check";
inline constexpr const char* kRestartRecovery = "restart_recovery";
}  // namespace event

/**
 * @brief Durable audit store backed by SQLite in WAL mode.
 *
 * Single-writer, multi-reader. Every append is committed before the call
 * returns, so a crash immediately afterwards never loses the row. Methods
 * throw StorageError on I/O failure or use after close().
 */
class Journal {
public:
    explicit Journal(const std::string& path);
    ~Journal();

    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    void close();
    bool is_open() const;
    const std::string& path() const { return path_; }

    // -- writers ------------------------------------------------------------
    void upsert_vol(const VolRow& row);
    void upsert_vol_batch(const std::vector<VolRow>& rows);
    std::int64_t open_trade(const TradeOpenRow& row);
    void close_trade(std::int64_t trade_id, Timestamp closed_at, double pnl_usd,
                     const std::string& close_reason);
    std::int64_t append_log(Timestamp ts, const std::optional<std::string>& invocation_id,
                            const std::string& kind, const nlohmann::json& payload);
    void append_inference(const InferenceCallRow& row);
    void meta_set(const std::string& key, const std::string& value);

    // -- readers ------------------------------------------------------------
    std::optional<std::string> meta_get(const std::string& key);
    std::vector<std::string> vol_assets();
    // Most recent `limit` rows for an asset, returned in ascending timestamp order.
    std::vector<VolRow> recent_vol(const std::string& asset, int limit);
    std::int64_t vol_count();
    std::vector<TradeRow> trades();  // ordered by id
    std::vector<TradeRow> open_trades();
    std::vector<TradeRow> recent_closed_trades(const std::string& asset, int k);  // newest first
    std::vector<LogRow> log_rows();  // ordered by seq
    std::int64_t count_log_kind(const std::string& kind);

    // Canonical dump: newline-delimited JSON with sorted keys and fixed
    // decimal formatting; tables emitted in order trades, vol_history,
    // pipeline_log, inference_calls.
    void export_session(std::ostream& out);

private:
    struct Stmt;
    void exec(const std::string& sql);
    void migrate();
    void ensure_open() const;

    std::string path_;
    sqlite3* db_ = nullptr;
    mutable std::mutex mu_;
};

}  // namespace sentra
