#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentra/backend.hpp"
#include "sentra/config.hpp"
#include "sentra/contracts.hpp"
#include "sentra/journal.hpp"
#include "sentra/router.hpp"
#include "sentra/types.hpp"

namespace sentra {

// k most recent closed trades for the asset, reasoning verbatim. A storage
// failure degrades to an empty briefing rather than blocking deliberation.
MemoryBriefing build_memory_briefing(Journal& store, const std::string& asset, int k);

// ---------------------------------------------------------------------------
// DRY_RUN position accounting

struct OpenPosition {
    std::int64_t trade_id = 0;
    std::string asset;
    Signal side = Signal::Long;
    double entry = 0.0;
    double stop_loss = 0.0;
    double take_profit = 0.0;
    double size_usd = 0.0;
    Timestamp opened_at = 0;
};

enum class CloseReason { TakeProfit, StopLoss, ForceClosed };

inline const char* close_reason_name(CloseReason r) {
    switch (r) {
        case CloseReason::TakeProfit: return "tp";
        case CloseReason::StopLoss: return "sl";
        default: return "force_closed";
    }
}

struct PositionClose {
    CloseReason reason = CloseReason::ForceClosed;
    double exit_price = 0.0;
    double pnl_usd = 0.0;
    Timestamp closed_at = 0;
};

double position_pnl(Signal side, double entry, double exit_price, double size_usd);

// Touch test for one tick. Fills at the touched level; when a single tick
// gaps over both levels the stop is applied (pessimistic tie-break).
std::optional<PositionClose> check_position(const OpenPosition& pos, const PriceTick& tick);

// Walks a tick stream until the position closes; mark-to-market at the last
// price when the stream ends with the position still open.
PositionClose simulate_position(const OpenPosition& pos, std::span<const PriceTick> ticks);

PositionClose force_close(const OpenPosition& pos, double last_price, Timestamp now);

// ---------------------------------------------------------------------------

/**
 * @brief Analyst -> Risk Manager -> Executor chain over typed contracts.
 *
 * Must only run while holding the admission lock. Every stage and every
 * backend call is journaled; schema violations get one re-prompt and then
 * resolve fail-safe (analyst: wait, risk: reject). A layer-A gate failure
 * rejects with zero backend calls.
 */
class DeliberationPipeline {
public:
    DeliberationPipeline(DeliberationBackend& backend, Journal& journal, ExecutionRouter& router,
                         const RiskConfig& risk_cfg);

    PipelineOutcome run(const std::string& invocation_id, const AnalystContext& ctx,
                        Timestamp now);

    // Individual stages, exposed for direct testing.
    std::optional<AnalystProposal> run_analyst(const std::string& invocation_id,
                                               const AnalystContext& ctx, Timestamp now,
                                               std::string* fail_reason);
    RiskVerdict run_risk_manager(const std::string& invocation_id, const std::string& asset,
                                 const AnalystProposal& proposal, const GateResults& gates,
                                 Timestamp now);
    ExecutionRecord run_executor(const std::string& invocation_id, const std::string& asset,
                                 const AnalystProposal& proposal, const RiskVerdict& verdict,
                                 Timestamp now);

private:
    DeliberationBackend& backend_;
    Journal& journal_;
    ExecutionRouter& router_;
    RiskConfig risk_cfg_;
};

}  // namespace sentra
