#include "sentra/trigger.hpp"

#include <cmath>

#include "sentra/errors.hpp"

namespace sentra {

std::optional<double> compute_return(const RollingBaseline& b, const PriceTick& tick) {
    if (tick.price <= 0.0) throw NonMonotoneTimestamp("tick price must be positive");
    if (b.last_timestamp >= 0 && tick.timestamp <= b.last_timestamp) {
        throw NonMonotoneTimestamp("tick for " + tick.asset + " at " +
                                   std::to_string(tick.timestamp) + " is not newer than " +
                                   std::to_string(b.last_timestamp));
    }
    if (!b.has_last()) return std::nullopt;
    return std::fabs(tick.price - b.last_price) / b.last_price;
}

double window_mean(const std::deque<double>& window) {
    if (window.empty()) return 0.0;
    double sum = 0.0;
    for (double v : window) sum += v;
    return sum / static_cast<double>(window.size());
}

double window_stddev(const std::deque<double>& window) {
    const std::size_t n = window.size();
    if (n < 2) return 0.0;
    const double mu = window_mean(window);
    double ss = 0.0;
    for (double v : window) {
        const double d = v - mu;
        ss += d * d;
    }
    // Sample (n-1) estimator.
    return std::sqrt(ss / static_cast<double>(n - 1));
}

std::optional<double> zscore(const RollingBaseline& b, double r, const TriggerConfig& cfg) {
    if (static_cast<int>(b.window.size()) < cfg.min_warmup) return std::nullopt;
    const double sd = window_stddev(b.window);
    if (!(sd >= cfg.std_epsilon)) return std::nullopt;
    const double z = (r - window_mean(b.window)) / sd;
    if (!std::isfinite(z)) return std::nullopt;
    return z;
}

void push_return(RollingBaseline& b, const PriceTick& tick, std::optional<double> r,
                 const TriggerConfig& cfg) {
    if (r) {
        b.window.push_back(*r);
        while (static_cast<int>(b.window.size()) > cfg.window) b.window.pop_front();
        b.sample_count += 1;
    }
    b.last_price = tick.price;
    b.last_timestamp = tick.timestamp;
}

std::optional<TriggerEvent> evaluate_trigger(std::optional<double> z, double r,
                                             const std::string& asset, Timestamp ts,
                                             const TriggerConfig& cfg) {
    const bool by_z = z.has_value() && *z >= cfg.z_threshold;
    const bool by_floor = r >= cfg.return_floor;
    if (!by_z && !by_floor) return std::nullopt;
    TriggerEvent ev;
    ev.asset = asset;
    ev.timestamp = ts;
    ev.r = r;
    ev.z = z;
    ev.fired_by = by_z && by_floor ? FiredBy::Both : (by_z ? FiredBy::Zscore : FiredBy::Floor);
    return ev;
}

TickUpdate process_tick(RollingBaseline& b, const PriceTick& tick, const TriggerConfig& cfg) {
    TickUpdate out;
    out.r = compute_return(b, tick);
    if (out.r) out.z = zscore(b, *out.r, cfg);
    push_return(b, tick, out.r, cfg);
    if (out.r) out.trigger = evaluate_trigger(out.z, *out.r, tick.asset, tick.timestamp, cfg);
    return out;
}

void persist_observation(Journal& store, const RollingBaseline& b, Timestamp ts,
                         std::optional<double> r, double price) {
    VolRow row;
    row.asset = b.asset;
    row.timestamp = ts;
    row.r = r;
    row.price = price;
    store.upsert_vol(row);
}

std::map<std::string, RollingBaseline> hot_restart(Journal& store, const TriggerConfig& cfg,
                                                   std::vector<std::string>* corrupt) {
    std::map<std::string, RollingBaseline> out;
    for (const auto& asset : store.vol_assets()) {
        // One extra row so a full window still has a usable last_price row.
        auto rows = store.recent_vol(asset, cfg.window + 1);
        if (rows.empty()) continue;
        RollingBaseline b;
        b.asset = asset;
        bool ok = true;
        Timestamp prev = -1;
        for (const auto& row : rows) {
            if (row.price <= 0.0 || (row.r && (*row.r < 0.0 || !std::isfinite(*row.r))) ||
                row.timestamp <= prev) {
                ok = false;
                break;
            }
            prev = row.timestamp;
        }
        if (!ok) {
            if (corrupt) corrupt->push_back(asset);
            continue;
        }
        for (const auto& row : rows) {
            if (row.r) b.window.push_back(*row.r);
        }
        while (static_cast<int>(b.window.size()) > cfg.window) b.window.pop_front();
        b.last_price = rows.back().price;
        b.last_timestamp = rows.back().timestamp;
        b.sample_count = static_cast<std::int64_t>(b.window.size());
        out.emplace(asset, std::move(b));
    }
    return out;
}

}  // namespace sentra
