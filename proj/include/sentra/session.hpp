#pragma once

#include <atomic>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sentra/backend.hpp"
#include "sentra/channels.hpp"
#include "sentra/config.hpp"
#include "sentra/feed.hpp"
#include "sentra/gate.hpp"
#include "sentra/journal.hpp"
#include "sentra/pipeline.hpp"
#include "sentra/router.hpp"
#include "sentra/trigger.hpp"

namespace sentra {

/**
 * @brief Orchestrates the full control loop:
 * poll -> baseline/trigger -> divergence score -> admission gate ->
 * deliberation pipeline -> execution -> journal.
 *
 * Replay sessions advance a virtual clock from file timestamps and are fully
 * deterministic for a fixed (fixture, seed, config) triple. Graceful shutdown
 * force-closes open positions and flushes the journal.
 */
class Session {
public:
    struct Deps {
        std::shared_ptr<ChannelCounters> counters;       // shared with the feed
        std::unique_ptr<FeedSource> feed;                // required
        std::unique_ptr<DeliberationBackend> backend;    // required
        std::shared_ptr<OrderTransport> private_tx;      // defaults to a stub
        std::unique_ptr<ProbeSet> probes;                // defaults to static down/down
    };

    Session(const SessionConfig& cfg, Journal& journal, Deps deps);

    // Runs until stop, replay exhaustion, or (when max_cycles >= 0) that many
    // polling cycles. Returns a process exit code.
    int run(const std::atomic<bool>* stop = nullptr, int max_cycles = -1);

    // Observability (used by tests and the acceptance suite).
    const ChannelCounters& counters() const { return *counters_; }
    InferenceGate& gate() { return *gate_; }
    DeliberationBackend& backend() { return *deps_.backend; }
    const std::map<std::string, RollingBaseline>& baselines() const { return baselines_; }
    const std::vector<OpenPosition>& open_positions() const { return positions_; }
    Timestamp now() const { return now_; }
    std::size_t restored_baselines() const { return restored_; }

private:
    void run_cycle(const std::vector<PriceTick>& ticks);
    void monitor_positions(const std::vector<PriceTick>& ticks);
    void handle_trigger(TriggerEvent trigger);
    void finish(const std::string& how);

    SessionConfig cfg_;
    Journal& journal_;
    Deps deps_;
    std::shared_ptr<ChannelCounters> counters_;
    std::unique_ptr<ExecutionRouter> router_;
    std::unique_ptr<InferenceGate> gate_;
    std::unique_ptr<DeliberationPipeline> pipeline_;

    std::map<std::string, RollingBaseline> baselines_;
    // (timestamp, price) pairs; aligned on shared timestamps for correlation.
    std::map<std::string, std::deque<std::pair<Timestamp, double>>> price_windows_;
    std::map<std::string, Timestamp> last_admitted_;
    std::map<std::string, double> last_price_;
    std::vector<OpenPosition> positions_;
    Timestamp now_ = 0;
    std::size_t restored_ = 0;
    bool finished_ = false;
    std::optional<nlohmann::json> pending_recovery_;
};

// Convenience used by the CLI and the python bindings: builds deps from the
// config (replay or REST feed, mock or remote backend, stub transport).
Session::Deps make_default_deps(const SessionConfig& cfg);

}  // namespace sentra
