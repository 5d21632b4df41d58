#include "sentra/session.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "sentra/decimal.hpp"
#include "sentra/errors.hpp"

namespace sentra {

namespace {

Timestamp wall_clock() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

Session::Session(const SessionConfig& cfg, Journal& journal, Deps deps)
    : cfg_(cfg), journal_(journal), deps_(std::move(deps)) {
    if (!deps_.feed) throw ConfigError("session requires a feed");
    if (!deps_.backend) throw ConfigError("session requires a deliberation backend");
    counters_ = deps_.counters ? deps_.counters : std::make_shared<ChannelCounters>();
    if (!deps_.private_tx) deps_.private_tx = std::make_shared<StubOrderTransport>();
    if (!deps_.probes) deps_.probes = std::make_unique<StaticProbeSet>(false, false);

    router_ = std::make_unique<ExecutionRouter>(cfg_.channel, deps_.private_tx,
                                                std::move(deps_.probes), counters_.get(),
                                                &journal_);
    gate_ = std::make_unique<InferenceGate>(cfg_.gate, &journal_);
    pipeline_ = std::make_unique<DeliberationPipeline>(*deps_.backend, journal_, *router_,
                                                       cfg_.risk);

    // Hot restart: rebuild baselines and correlation windows from vol_history
    // so triggering can resume on the very first cycle.
    std::vector<std::string> corrupt;
    baselines_ = hot_restart(journal_, cfg_.trigger, &corrupt);
    for (const auto& [asset, b] : baselines_) {
        for (const auto& row : journal_.recent_vol(asset, cfg_.divergence.window)) {
            price_windows_[asset].emplace_back(row.timestamp, row.price);
        }
        last_price_[asset] = b.last_price;
    }
    restored_ = baselines_.size();
    if (restored_ > 0 || !corrupt.empty()) {
        pending_recovery_ = nlohmann::json();
        (*pending_recovery_)["restored_assets"] = static_cast<std::int64_t>(restored_);
        (*pending_recovery_)["corrupt_assets"] = corrupt;
    }
    // Re-adopt any positions that were still open when the previous session died.
    for (const auto& t : journal_.open_trades()) {
        positions_.push_back({t.id, t.asset, t.signal, t.entry, t.stop_loss, t.take_profit,
                              t.size_usd, t.opened_at});
    }
}

void Session::monitor_positions(const std::vector<PriceTick>& ticks) {
    for (const auto& tick : ticks) {
        for (auto it = positions_.begin(); it != positions_.end();) {
            auto close = check_position(*it, tick);
            if (!close) {
                ++it;
                continue;
            }
            journal_.close_trade(it->trade_id, close->closed_at, close->pnl_usd,
                                 close_reason_name(close->reason));
            nlohmann::json j;
            j["trade_id"] = it->trade_id;
            j["asset"] = it->asset;
            j["reason"] = close_reason_name(close->reason);
            j["exit_price"] = format_fixed(close->exit_price, 8);
            j["pnl_usd"] = format_fixed(close->pnl_usd, 8);
            journal_.append_log(close->closed_at, std::nullopt, event::kTradeClose, j);
            it = positions_.erase(it);
        }
    }
}

void Session::handle_trigger(TriggerEvent trigger) {
    const std::string& asset = trigger.asset;

    // Per-asset anti-burst cooldown, enforced before the admission gate.
    auto last = last_admitted_.find(asset);
    if (last != last_admitted_.end() && now_ - last->second < cfg_.asset_cooldown_s) {
        nlohmann::json j;
        j["asset"] = asset;
        j["remaining_s"] = cfg_.asset_cooldown_s - (now_ - last->second);
        journal_.append_log(now_, std::nullopt, event::kAssetCooldown, j);
        return;
    }

    auto decision = gate_->try_admit(trigger, now_);
    if (!decision.admitted) return;  // discarded; the gate journaled why
    last_admitted_[asset] = now_;

    Admission admission(*gate_, decision.invocation_id, [this] { return now_; });
    nlohmann::json outcome;
    outcome["asset"] = asset;

    MarketContext market;
    try {
        market = deps_.feed->market_context(asset, now_);
    } catch (const TransportError& e) {
        nlohmann::json j;
        j["asset"] = asset;
        j["error"] = e.what();
        journal_.append_log(now_, decision.invocation_id, event::kTransportError, j);
        outcome["stage_reached"] = "aborted";
        outcome["reason"] = "context_unavailable";
        admission.set_outcome(outcome);
        return;
    }

    AnalystContext ctx;
    ctx.market = std::move(market);
    ctx.trigger = trigger;
    {
        const auto& asset_win = price_windows_[asset];
        std::vector<double> prices_asset, prices_ref;
        auto ref_it = price_windows_.find(cfg_.divergence.reference_asset);
        if (ref_it != price_windows_.end() && asset != cfg_.divergence.reference_asset) {
            // Align the two windows on shared timestamps.
            std::map<Timestamp, double> ref_by_ts(ref_it->second.begin(), ref_it->second.end());
            for (const auto& [ts, price] : asset_win) {
                auto hit = ref_by_ts.find(ts);
                if (hit == ref_by_ts.end()) continue;
                prices_asset.push_back(price);
                prices_ref.push_back(hit->second);
            }
        } else if (asset == cfg_.divergence.reference_asset) {
            for (const auto& [ts, price] : asset_win) {
                prices_asset.push_back(price);
                prices_ref.push_back(price);
            }
        }
        ctx.score = score_divergence(trigger.z, prices_asset, prices_ref, cfg_.divergence);
        ctx.trigger.omega = ctx.score.omega;
    }
    ctx.memory = build_memory_briefing(journal_, asset, cfg_.memory_briefing_k);

    PipelineOutcome result = pipeline_->run(decision.invocation_id, ctx, now_);
    if (result.stage == StageReached::Executed && result.execution) {
        positions_.push_back({result.execution->trade_id, asset, result.execution->side,
                              result.execution->entry, result.execution->stop_loss,
                              result.execution->take_profit, result.execution->size_usd, now_});
    }
    outcome["stage_reached"] = stage_name(result.stage);
    if (!result.reason.empty()) outcome["reason"] = result.reason;
    admission.set_outcome(outcome);
}

void Session::run_cycle(const std::vector<PriceTick>& ticks) {
    monitor_positions(ticks);

    struct Candidate {
        TriggerEvent trigger;
        double omega_hint = 0.0;
    };
    std::vector<Candidate> candidates;
    std::vector<VolRow> vol_rows;

    for (const auto& tick : ticks) {
        auto& baseline = baselines_[tick.asset];
        if (baseline.asset.empty()) baseline.asset = tick.asset;
        TickUpdate update;
        try {
            update = process_tick(baseline, tick, cfg_.trigger);
        } catch (const NonMonotoneTimestamp& e) {
            nlohmann::json j;
            j["asset"] = tick.asset;
            j["error"] = e.what();
            journal_.append_log(now_, std::nullopt, event::kTickRejected, j);
            continue;
        }
        vol_rows.push_back({tick.asset, tick.timestamp, update.r, tick.price});
        auto& win = price_windows_[tick.asset];
        win.emplace_back(tick.timestamp, tick.price);
        while (static_cast<int>(win.size()) > cfg_.divergence.window) win.pop_front();
        last_price_[tick.asset] = tick.price;
        if (update.trigger) candidates.push_back({*update.trigger, 0.0});
    }

    // Baselines become durable before any deliberation for this cycle.
    journal_.upsert_vol_batch(vol_rows);

    // Same-cycle contention tie-break: highest composite score first. The
    // hint is computed from the same windows the pipeline will see.
    for (auto& c : candidates) {
        const auto& asset_win = price_windows_[c.trigger.asset];
        std::vector<double> a, r;
        auto ref_it = price_windows_.find(cfg_.divergence.reference_asset);
        if (ref_it != price_windows_.end()) {
            std::map<Timestamp, double> ref_by_ts(ref_it->second.begin(), ref_it->second.end());
            for (const auto& [ts, price] : asset_win) {
                auto hit = ref_by_ts.find(ts);
                if (hit == ref_by_ts.end()) continue;
                a.push_back(price);
                r.push_back(hit->second);
            }
        }
        auto score = score_divergence(c.trigger.z, a, r, cfg_.divergence);
        c.omega_hint = score.omega;
        c.trigger.omega = score.omega;
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.omega_hint != y.omega_hint) return x.omega_hint > y.omega_hint;
        return x.trigger.asset < y.trigger.asset;
    });

    for (auto& c : candidates) handle_trigger(std::move(c.trigger));
}

void Session::finish(const std::string& how) {
    if (finished_) return;
    finished_ = true;
    // Mark-to-market close of anything still open.
    for (const auto& pos : positions_) {
        double last = pos.entry;
        auto it = last_price_.find(pos.asset);
        if (it != last_price_.end()) last = it->second;
        const auto close = force_close(pos, last, now_);
        journal_.close_trade(pos.trade_id, close.closed_at, close.pnl_usd,
                             close_reason_name(close.reason));
        nlohmann::json j;
        j["trade_id"] = pos.trade_id;
        j["asset"] = pos.asset;
        j["reason"] = close_reason_name(close.reason);
        j["exit_price"] = format_fixed(close.exit_price, 8);
        j["pnl_usd"] = format_fixed(close.pnl_usd, 8);
        journal_.append_log(now_, std::nullopt, event::kTradeClose, j);
    }
    positions_.clear();
    nlohmann::json j;
    j["how"] = how;
    j["public_calls"] = counters_->public_calls.load();
    j["private_calls"] = counters_->private_calls.load();
    journal_.append_log(now_, std::nullopt, event::kSessionEnd, j);
}

int Session::run(const std::atomic<bool>* stop, int max_cycles) {
    {
        const Timestamp start_ts = deps_.feed->next_time().value_or(wall_clock());
        if (pending_recovery_) {
            journal_.append_log(start_ts, std::nullopt, event::kRestartRecovery,
                                *pending_recovery_);
            pending_recovery_.reset();
        }
        nlohmann::json j;
        j["mode"] = mode_name(cfg_.channel.mode);
        j["seed"] = cfg_.seed;
        j["polling_interval_s"] = cfg_.polling_interval_s;
        j["restored_assets"] = static_cast<std::int64_t>(restored_);
        journal_.append_log(start_ts, std::nullopt, event::kSessionStart, j);
    }
    int cycles = 0;
    std::string how = "replay_exhausted";
    while (max_cycles < 0 || cycles < max_cycles) {
        if (stop && stop->load()) {
            how = "stop_signal";
            break;
        }
        const auto scheduled = deps_.feed->next_time();
        const bool virtual_clock = scheduled.has_value();
        now_ = virtual_clock ? *scheduled : wall_clock();

        std::vector<PriceTick> ticks;
        try {
            ticks = deps_.feed->poll(cfg_.assets, now_);
        } catch (const ReplayExhausted&) {
            how = "replay_exhausted";
            break;
        }
        for (const auto& err : deps_.feed->take_errors()) {
            nlohmann::json j;
            j["error"] = err;
            journal_.append_log(now_, std::nullopt, event::kTransportError, j);
        }
        run_cycle(ticks);
        ++cycles;

        if (!virtual_clock) {
            // Live cadence: sleep out the remainder of the polling interval,
            // staying responsive to the stop flag.
            const Timestamp next = now_ + cfg_.polling_interval_s;
            while (wall_clock() < next) {
                if (stop && stop->load()) break;
                std::this_thread::sleep_for(std::chrono::milliseconds(100));
            }
        }
    }
    if (max_cycles >= 0 && !finished_ && how == "replay_exhausted" &&
        deps_.feed->next_time().has_value()) {
        // Bounded run with input remaining: leave positions open so a later
        // session (hot restart) can adopt them.
        nlohmann::json j;
        j["how"] = "paused";
        journal_.append_log(now_, std::nullopt, event::kSessionEnd, j);
        finished_ = true;
        return 0;
    }
    finish(how);
    return 0;
}

Session::Deps make_default_deps(const SessionConfig& cfg) {
    Session::Deps deps;
    deps.counters = std::make_shared<ChannelCounters>();
    if (cfg.feed.kind == FeedConfig::Kind::Replay) {
        deps.feed = std::make_unique<ReplayFeed>(cfg.feed.replay_path, deps.counters.get(),
                                                 cfg.context_candles);
    } else {
        deps.feed = std::make_unique<RestFeed>(cfg.feed, deps.counters.get());
    }
    BackendConfig backend_cfg = cfg.backend;
    backend_cfg.seed = cfg.seed;
    deps.backend = make_backend(backend_cfg);
    deps.private_tx = std::make_shared<StubOrderTransport>();
    if (cfg.channel.mode == Mode::Live) {
        deps.probes = std::make_unique<HttpProbeSet>(cfg.channel.private_proxy,
                                                     cfg.channel.health_url);
    }
    return deps;
}

}  // namespace sentra
