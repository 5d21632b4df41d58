#include "sentra/router.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sentra/decimal.hpp"
#include "sentra/errors.hpp"

namespace sentra {

HttpProbeSet::HttpProbeSet(std::string proxy_url, std::string exchange_url, int timeout_s)
    : proxy_url_(std::move(proxy_url)), exchange_url_(std::move(exchange_url)),
      timeout_s_(timeout_s) {}

namespace {

bool http_alive(const std::string& url, int timeout_s) {
    if (url.empty()) return false;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return false;
    auto path_at = url.find('/', scheme_end + 3);
    const std::string origin = path_at == std::string::npos ? url : url.substr(0, path_at);
    const std::string path = path_at == std::string::npos ? "/" : url.substr(path_at);
    try {
        httplib::Client client(origin);
        client.set_connection_timeout(timeout_s, 0);
        client.set_read_timeout(timeout_s, 0);
        auto res = client.Get(path);
        return res && res->status >= 200 && res->status < 400;
    } catch (...) {
        return false;
    }
}

}  // namespace

bool HttpProbeSet::probe_proxy() { return http_alive(proxy_url_, timeout_s_); }
bool HttpProbeSet::probe_exchange() { return http_alive(exchange_url_, timeout_s_); }

ExecutionRouter::ExecutionRouter(const ChannelSettings& settings,
                                 std::shared_ptr<OrderTransport> private_tx,
                                 std::unique_ptr<ProbeSet> probes, ChannelCounters* counters,
                                 Journal* journal)
    : settings_(settings), private_tx_(std::move(private_tx)), probes_(std::move(probes)),
      counters_(counters), journal_(journal) {
    if (settings_.mode == Mode::Live && !private_tx_)
        throw ConfigError("LIVE mode requires a private channel transport");
}

SafetyStatus ExecutionRouter::check_safety(Timestamp now) {
    SafetyStatus s;
    s.checked_at = now;
    if (probes_) {
        // Probe exceptions read as false: the gate fails closed.
        try {
            s.tor_active = probes_->probe_proxy();
        } catch (...) {
            s.tor_active = false;
        }
        try {
            s.exchange_reachable = probes_->probe_exchange();
        } catch (...) {
            s.exchange_reachable = false;
        }
    }
    s.safe = s.tor_active && s.exchange_reachable;
    {
        std::lock_guard<std::mutex> lk(mu_);
        cached_ = s;
    }
    if (journal_) {
        nlohmann::json j;
        j["tor_active"] = s.tor_active;
        j["exchange_reachable"] = s.exchange_reachable;
        j["safe"] = s.safe;
        journal_->append_log(now, std::nullopt, event::kSafetyCheck, j);
    }
    return s;
}

std::optional<SafetyStatus> ExecutionRouter::cached_safety() const {
    std::lock_guard<std::mutex> lk(mu_);
    return cached_;
}

std::string order_request_json(const OrderRequest& order) {
    nlohmann::json j;
    j["asset"] = order.asset;
    j["side"] = signal_name(order.side);
    j["size_usd"] = format_fixed(order.size_usd, 2);
    j["entry"] = format_fixed(order.entry, 8);
    j["sl"] = format_fixed(order.stop_loss, 8);
    j["tp"] = format_fixed(order.take_profit, 8);
    j["client_id"] = order.client_id;
    return j.dump();
}

ExecutionRecord ExecutionRouter::route_order(const OrderRequest& order, Timestamp now) {
    ExecutionRecord rec;
    rec.invocation_id = order.client_id;
    rec.asset = order.asset;
    rec.side = order.side;
    rec.entry = order.entry;
    rec.stop_loss = order.stop_loss;
    rec.take_profit = order.take_profit;
    rec.size_usd = order.size_usd;
    rec.executed_at = now;

    if (settings_.mode == Mode::DryRun) {
        rec.channel = "none";
        return rec;
    }

    // LIVE: the gate demands a fresh safe status before every order.
    SafetyStatus status;
    {
        std::lock_guard<std::mutex> lk(mu_);
        if (cached_ && now - cached_->checked_at <= settings_.safety_ttl_s) status = *cached_;
    }
    if (status.checked_at == 0 || now - status.checked_at > settings_.safety_ttl_s) {
        status = check_safety(now);
    }
    if (!status.safe) {
        throw SafetyGateClosed(std::string("safety gate closed: tor_active=") +
                               (status.tor_active ? "true" : "false") + " exchange_reachable=" +
                               (status.exchange_reachable ? "true" : "false"));
    }
    if (counters_) counters_->private_calls.fetch_add(1);
    try {
        private_tx_->send(order_request_json(order));
    } catch (const TransportError& e) {
        throw RouterError(std::string("private channel send failed: ") + e.what());
    }
    rec.channel = "private";
    return rec;
}

}  // namespace sentra
