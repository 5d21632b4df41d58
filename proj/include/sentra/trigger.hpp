#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>

#include "sentra/config.hpp"
#include "sentra/journal.hpp"
#include "sentra/types.hpp"

namespace sentra {

// Per-asset rolling window of instantaneous return magnitudes.
struct RollingBaseline {
    std::string asset;
    std::deque<double> window;  // at most cfg.window entries, all >= 0
    double last_price = 0.0;    // 0 = no observation yet
    Timestamp last_timestamp = -1;
    std::int64_t sample_count = 0;  // returns ever observed, >= window.size()

    bool has_last() const { return last_price > 0.0; }
};

enum class FiredBy { Zscore, Floor, Both };

inline const char* fired_by_name(FiredBy f) {
    switch (f) {
        case FiredBy::Zscore: return "zscore";
        case FiredBy::Floor: return "floor";
        default: return "both";
    }
}

struct TriggerEvent {
    std::string asset;
    Timestamp timestamp = 0;
    double r = 0.0;
    std::optional<double> z;  // absent below warmup or under degenerate stddev
    FiredBy fired_by = FiredBy::Floor;
    std::optional<double> omega;  // attached later by the divergence scorer
};

struct TickUpdate {
    std::optional<double> r;  // absent on the first observation of an asset
    std::optional<double> z;
    std::optional<TriggerEvent> trigger;
};

// Return magnitude |p_t - p_{t-1}| / p_{t-1} against the baseline's last
// price. Empty for the first observation. Throws NonMonotoneTimestamp when
// the tick is not strictly newer than the last one seen.
std::optional<double> compute_return(const RollingBaseline& b, const PriceTick& tick);

// Anomaly z-score of r against the current window contents (r itself is not
// yet part of the window). Absent when the window is below min_warmup or the
// sample standard deviation is degenerate; never NaN or infinite.
std::optional<double> zscore(const RollingBaseline& b, double r, const TriggerConfig& cfg);

// Two-pass sample mean / standard deviation used by zscore; exposed so tests
// can cross-check the streaming path against the same arithmetic.
double window_mean(const std::deque<double>& window);
double window_stddev(const std::deque<double>& window);

// Appends r (when present) to the window, evicting the oldest entry at
// capacity, and advances last_price / last_timestamp.
void push_return(RollingBaseline& b, const PriceTick& tick, std::optional<double> r,
                 const TriggerConfig& cfg);

// Disjunctive trigger: fires iff (z defined and z >= threshold) or
// (r >= return_floor). Records which disjunct held.
std::optional<TriggerEvent> evaluate_trigger(std::optional<double> z, double r,
                                             const std::string& asset, Timestamp ts,
                                             const TriggerConfig& cfg);

// Full per-tick step in the documented order: compute r, score it against the
// window excluding r, then insert r and evaluate the trigger.
TickUpdate process_tick(RollingBaseline& b, const PriceTick& tick, const TriggerConfig& cfg);

// Durably records this cycle's observation; idempotent per (asset, timestamp).
void persist_observation(Journal& store, const RollingBaseline& b, Timestamp ts,
                         std::optional<double> r, double price);

// Rebuilds per-asset baselines from vol_history so the first post-restart
// cycle can trigger without warmup. Assets with corrupt history cold-start;
// their names are reported in `corrupt`.
std::map<std::string, RollingBaseline> hot_restart(Journal& store, const TriggerConfig& cfg,
                                                   std::vector<std::string>* corrupt = nullptr);

}  // namespace sentra
