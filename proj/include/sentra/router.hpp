#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "sentra/channels.hpp"
#include "sentra/config.hpp"
#include "sentra/contracts.hpp"
#include "sentra/journal.hpp"
#include "sentra/types.hpp"

namespace sentra {

struct SafetyStatus {
    bool tor_active = false;
    bool exchange_reachable = false;
    bool safe = false;  // conjunction of the two probes
    Timestamp checked_at = 0;
};

// Liveness probes for the private path. Any probe failure or timeout reads
// as false (fail-closed).
class ProbeSet {
public:
    virtual ~ProbeSet() = default;
    virtual bool probe_proxy() = 0;
    virtual bool probe_exchange() = 0;
};

class StaticProbeSet : public ProbeSet {
public:
    StaticProbeSet(bool proxy_up, bool exchange_up) : proxy_(proxy_up), exchange_(exchange_up) {}
    bool probe_proxy() override { return proxy_; }
    bool probe_exchange() override { return exchange_; }
    void set(bool proxy_up, bool exchange_up) {
        proxy_ = proxy_up;
        exchange_ = exchange_up;
    }

private:
    bool proxy_ = false;
    bool exchange_ = false;
};

// HTTP GET health checks against the configured proxy and exchange URLs.
class HttpProbeSet : public ProbeSet {
public:
    HttpProbeSet(std::string proxy_url, std::string exchange_url, int timeout_s = 5);
    bool probe_proxy() override;
    bool probe_exchange() override;

private:
    std::string proxy_url_;
    std::string exchange_url_;
    int timeout_s_;
};

/**
 * @brief Dual-channel order path with a fail-closed safety gate.
 *
 * Market data uses the public channel (counted by the feed); orders go
 * exclusively through the private channel transport. In DRY_RUN the private
 * transport is never invoked. A LIVE order requires a safety status no older
 * than the TTL; a stale one triggers a fresh check.
 */
class ExecutionRouter {
public:
    ExecutionRouter(const ChannelSettings& settings, std::shared_ptr<OrderTransport> private_tx,
                    std::unique_ptr<ProbeSet> probes, ChannelCounters* counters,
                    Journal* journal = nullptr);

    SafetyStatus check_safety(Timestamp now);
    std::optional<SafetyStatus> cached_safety() const;

    // Routes an approved order. DRY_RUN returns a synthetic record without a
    // transport call; LIVE either sends through the private channel or throws
    // SafetyGateClosed / RouterError.
    ExecutionRecord route_order(const OrderRequest& order, Timestamp now);

    Mode mode() const { return settings_.mode; }

private:
    ChannelSettings settings_;
    std::shared_ptr<OrderTransport> private_tx_;
    std::unique_ptr<ProbeSet> probes_;
    ChannelCounters* counters_;
    Journal* journal_;
    mutable std::mutex mu_;
    std::optional<SafetyStatus> cached_;
};

std::string order_request_json(const OrderRequest& order);

}  // namespace sentra
