#include "sentra/pipeline.hpp"

#include <cmath>

#include "sentra/decimal.hpp"
#include "sentra/errors.hpp"

namespace sentra {

MemoryBriefing build_memory_briefing(Journal& store, const std::string& asset, int k) {
    MemoryBriefing m;
    m.asset = asset;
    try {
        for (const auto& t : store.recent_closed_trades(asset, k)) {
            MemoryEntry e;
            e.timestamp = t.closed_at.value_or(t.opened_at);
            e.signal = t.signal;
            e.pnl_usd = t.pnl_usd.value_or(0.0);
            e.reasoning = t.analyst_reasoning;
            m.past.push_back(std::move(e));
        }
    } catch (const StorageError&) {
        m.past.clear();
        m.degraded = true;
    }
    return m;
}

double position_pnl(Signal side, double entry, double exit_price, double size_usd) {
    const double move = exit_price / entry - 1.0;
    return (side == Signal::Short ? -move : move) * size_usd;
}

std::optional<PositionClose> check_position(const OpenPosition& pos, const PriceTick& tick) {
    if (tick.asset != pos.asset) return std::nullopt;
    const double p = tick.price;
    bool hit_sl = false, hit_tp = false;
    if (pos.side == Signal::Long) {
        hit_sl = p <= pos.stop_loss;
        hit_tp = p >= pos.take_profit;
    } else {
        hit_sl = p >= pos.stop_loss;
        hit_tp = p <= pos.take_profit;
    }
    if (!hit_sl && !hit_tp) return std::nullopt;
    PositionClose c;
    // Stop first when one tick gaps over both levels.
    c.reason = hit_sl ? CloseReason::StopLoss : CloseReason::TakeProfit;
    c.exit_price = hit_sl ? pos.stop_loss : pos.take_profit;
    c.pnl_usd = position_pnl(pos.side, pos.entry, c.exit_price, pos.size_usd);
    c.closed_at = tick.timestamp;
    return c;
}

PositionClose force_close(const OpenPosition& pos, double last_price, Timestamp now) {
    PositionClose c;
    c.reason = CloseReason::ForceClosed;
    c.exit_price = last_price;
    c.pnl_usd = position_pnl(pos.side, pos.entry, last_price, pos.size_usd);
    c.closed_at = now;
    return c;
}

PositionClose simulate_position(const OpenPosition& pos, std::span<const PriceTick> ticks) {
    double last = pos.entry;
    Timestamp last_ts = pos.opened_at;
    for (const auto& tick : ticks) {
        if (tick.asset != pos.asset) continue;
        if (auto c = check_position(pos, tick)) return *c;
        last = tick.price;
        last_ts = tick.timestamp;
    }
    return force_close(pos, last, last_ts);
}

// ---------------------------------------------------------------------------

DeliberationPipeline::DeliberationPipeline(DeliberationBackend& backend, Journal& journal,
                                           ExecutionRouter& router, const RiskConfig& risk_cfg)
    : backend_(backend), journal_(journal), router_(router), risk_cfg_(risk_cfg) {}

namespace {

nlohmann::json proposal_json(const AnalystProposal& p) {
    nlohmann::json j;
    j["signal"] = signal_name(p.signal);
    j["confidence"] = p.confidence;
    j["entry_price"] = p.entry_price;
    j["stop_loss"] = p.stop_loss;
    j["take_profit"] = p.take_profit;
    j["size_usd"] = p.size_usd;
    j["reasoning"] = p.reasoning;
    return j;
}

nlohmann::json gates_json(const GateResults& g) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : g.checks)
        arr.push_back(nlohmann::json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return arr;
}

}  // namespace

std::optional<AnalystProposal> DeliberationPipeline::run_analyst(const std::string& invocation_id,
                                                                 const AnalystContext& ctx,
                                                                 Timestamp now,
                                                                 std::string* fail_reason) {
    const std::string request = ctx.render_json();
    // One re-prompt after a schema violation, then fail safe.
    for (int attempt = 0; attempt < 2; ++attempt) {
        InferenceCallRow call;
        call.invocation_id = invocation_id;
        call.role = "analyst";
        call.started_at = now;
        call.request_bytes = static_cast<std::int64_t>(request.size());
        std::string raw;
        try {
            raw = backend_.complete_analyst(ctx);
        } catch (const BackendTimeout&) {
            call.ended_at = now;
            call.outcome = "timeout";
            journal_.append_inference(call);
            if (fail_reason) *fail_reason = "backend_timeout";
            return std::nullopt;
        }
        call.ended_at = now;
        call.response_bytes = static_cast<std::int64_t>(raw.size());
        try {
            AnalystProposal p = parse_analyst_proposal(raw);
            call.outcome = "ok";
            journal_.append_inference(call);
            return p;
        } catch (const SchemaViolation& e) {
            call.outcome = "schema_violation";
            journal_.append_inference(call);
            nlohmann::json j;
            j["attempt"] = attempt;
            j["error"] = e.what();
            journal_.append_log(now, invocation_id, event::kStageAnalyst, j);
        }
    }
    if (fail_reason) *fail_reason = "malformed_output";
    return std::nullopt;
}

RiskVerdict DeliberationPipeline::run_risk_manager(const std::string& invocation_id,
                                                   const std::string& asset,
                                                   const AnalystProposal& proposal,
                                                   const GateResults& gates, Timestamp now) {
    RiskVerdict v;
    v.gates = gates;
    if (!gates.all_pass()) {
        // Layer A veto: no backend involvement whatsoever.
        v.approved = false;
        v.gate_layer_only = true;
        v.reject_reason = "hard_gate";
        v.negotiation_summary = "Rejected by deterministic hard gates before any model call.";
        return v;
    }

    RiskContext ctx;
    ctx.asset = asset;
    ctx.proposal = proposal;
    ctx.gates = gates;
    ctx.max_size_usd = risk_cfg_.max_size_usd;
    const std::string request = ctx.render_json();

    for (int attempt = 0; attempt < 2; ++attempt) {
        InferenceCallRow call;
        call.invocation_id = invocation_id;
        call.role = "risk_manager";
        call.started_at = now;
        call.request_bytes = static_cast<std::int64_t>(request.size());
        std::string raw;
        try {
            raw = backend_.complete_risk(ctx);
        } catch (const BackendTimeout&) {
            call.ended_at = now;
            call.outcome = "timeout";
            journal_.append_inference(call);
            v.approved = false;
            v.reject_reason = "backend_timeout";
            v.negotiation_summary = "Risk backend timed out; defaulting to non-action.";
            return v;
        }
        call.ended_at = now;
        call.response_bytes = static_cast<std::int64_t>(raw.size());
        try {
            RiskReply reply = parse_risk_reply(raw);
            call.outcome = "ok";
            journal_.append_inference(call);
            if (!reply.approved) {
                v.approved = false;
                v.reject_reason = "contextual";
                v.negotiation_summary = reply.negotiation_summary;
                return v;
            }
            // The verdict can narrow limits, never widen them.
            double size = reply.size_usd;
            if (size > risk_cfg_.max_size_usd) {
                size = risk_cfg_.max_size_usd;
                v.clamped = true;
            }
            if (size <= 0.0) {
                v.approved = false;
                v.reject_reason = "zero_size";
                v.negotiation_summary = reply.negotiation_summary;
                return v;
            }
            v.approved = true;
            v.size_usd = size;
            v.negotiation_summary = reply.negotiation_summary;
            return v;
        } catch (const SchemaViolation& e) {
            call.outcome = "schema_violation";
            journal_.append_inference(call);
            nlohmann::json j;
            j["attempt"] = attempt;
            j["error"] = e.what();
            journal_.append_log(now, invocation_id, event::kStageRisk, j);
        }
    }
    v.approved = false;
    v.reject_reason = "malformed_output";
    v.negotiation_summary = "Risk reply failed schema validation twice; defaulting to non-action.";
    return v;
}

ExecutionRecord DeliberationPipeline::run_executor(const std::string& invocation_id,
                                                   const std::string& asset,
                                                   const AnalystProposal& proposal,
                                                   const RiskVerdict& verdict, Timestamp now) {
    OrderRequest order;
    order.asset = asset;
    order.side = proposal.signal;
    order.size_usd = verdict.size_usd;
    order.entry = proposal.entry_price;
    order.stop_loss = proposal.stop_loss;
    order.take_profit = proposal.take_profit;
    order.client_id = invocation_id;
    return router_.route_order(order, now);
}

PipelineOutcome DeliberationPipeline::run(const std::string& invocation_id,
                                          const AnalystContext& ctx, Timestamp now) {
    PipelineOutcome out;
    out.invocation_id = invocation_id;
    const std::string& asset = ctx.market.asset;

    std::string fail_reason;
    auto proposal = run_analyst(invocation_id, ctx, now, &fail_reason);
    if (!proposal) {
        out.stage = StageReached::AnalystWait;
        out.reason = fail_reason;
        journal_.append_log(now, invocation_id, event::kStageAnalyst,
                            nlohmann::json{{"resolution", fail_reason}});
        return out;
    }
    journal_.append_log(now, invocation_id, event::kStageAnalyst,
                        nlohmann::json{{"proposal", proposal_json(*proposal)}});
    out.proposal = proposal;

    if (proposal->signal == Signal::Wait) {
        out.stage = StageReached::AnalystWait;
        out.reason = "self_abstain";
        return out;
    }

    const GateResults gates = hard_gates(*proposal, risk_cfg_);
    journal_.append_log(now, invocation_id, event::kStageGates,
                        nlohmann::json{{"gates", gates_json(gates)}, {"all_pass", gates.all_pass()}});

    RiskVerdict verdict = run_risk_manager(invocation_id, asset, *proposal, gates, now);
    journal_.append_log(now, invocation_id, event::kStageRisk,
                        nlohmann::json{{"approved", verdict.approved},
                                       {"size_usd", verdict.size_usd},
                                       {"gate_layer_only", verdict.gate_layer_only},
                                       {"clamped", verdict.clamped},
                                       {"reject_reason", verdict.reject_reason},
                                       {"negotiation_summary", verdict.negotiation_summary}});
    out.verdict = verdict;
    if (!verdict.approved) {
        out.stage = verdict.gate_layer_only ? StageReached::GateReject
                                            : StageReached::ContextualReject;
        out.reason = verdict.reject_reason;
        return out;
    }

    try {
        ExecutionRecord rec = run_executor(invocation_id, asset, *proposal, verdict, now);
        journal_.append_log(now, invocation_id, event::kStageExecution,
                            nlohmann::json{{"channel", rec.channel},
                                           {"size_usd", format_fixed(rec.size_usd, 2)},
                                           {"side", signal_name(rec.side)}});
        out.execution = rec;
        out.stage = StageReached::Executed;
    } catch (const SafetyGateClosed& e) {
        journal_.append_log(now, invocation_id, event::kStageExecution,
                            nlohmann::json{{"blocked", true}, {"error", e.what()}});
        out.stage = StageReached::Aborted;
        out.reason = "safety_gate_closed";
    } catch (const RouterError& e) {
        journal_.append_log(now, invocation_id, event::kStageExecution,
                            nlohmann::json{{"failed", true}, {"error", e.what()}});
        out.stage = StageReached::Aborted;
        out.reason = "router_error";
    }
    return out;
}

}  // namespace sentra
