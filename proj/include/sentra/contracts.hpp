#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sentra/config.hpp"
#include "sentra/types.hpp"

namespace sentra {

// Typed JSON contracts flowing through the deliberation pipeline. Parsing is
// strict: unknown fields, numeric strings, and out-of-range values are all
// schema violations.

struct AnalystProposal {
    Signal signal = Signal::Wait;
    double confidence = 0.0;  // [0, 1]
    double entry_price = 0.0;
    double stop_loss = 0.0;
    double take_profit = 0.0;
    double size_usd = 0.0;
    std::string reasoning;
};

struct GateCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

// All four gates are always evaluated, even after an earlier failure, so the
// audit record is complete.
struct GateResults {
    std::array<GateCheck, 4> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct RiskVerdict {
    bool approved = false;
    double size_usd = 0.0;
    std::string negotiation_summary;
    GateResults gates;
    bool gate_layer_only = false;  // rejected before the contextual check
    bool clamped = false;          // backend size was cut to the hard cap
    std::string reject_reason;
};

struct MemoryEntry {
    Timestamp timestamp = 0;
    Signal signal = Signal::Wait;
    double pnl_usd = 0.0;
    std::string reasoning;  // verbatim as journaled
};

struct MemoryBriefing {
    std::string asset;
    std::vector<MemoryEntry> past;  // most recent first
    bool degraded = false;          // storage unavailable, pipeline proceeds
};

enum class StageReached { AnalystWait, GateReject, ContextualReject, Executed, Aborted };

inline const char* stage_name(StageReached s) {
    switch (s) {
        case StageReached::AnalystWait: return "analyst_wait";
        case StageReached::GateReject: return "gate_reject";
        case StageReached::ContextualReject: return "contextual_reject";
        case StageReached::Executed: return "executed";
        default: return "aborted";
    }
}

struct ExecutionRecord {
    std::string invocation_id;
    std::string asset;
    Signal side = Signal::Long;
    double entry = 0.0;
    double stop_loss = 0.0;
    double take_profit = 0.0;
    double size_usd = 0.0;
    std::string channel;  // "none" in DRY_RUN, "private" in LIVE
    Timestamp executed_at = 0;
    std::int64_t trade_id = 0;
};

struct PipelineOutcome {
    std::string invocation_id;
    StageReached stage = StageReached::Aborted;
    std::optional<AnalystProposal> proposal;
    std::optional<RiskVerdict> verdict;
    std::optional<ExecutionRecord> execution;
    std::string reason;  // set for wait/reject/abort paths
};

// Strict schema validation. Both throw SchemaViolation with a reason.
AnalystProposal parse_analyst_proposal(const std::string& raw);
struct RiskReply {
    bool approved = false;
    double size_usd = 0.0;
    std::string negotiation_summary;
};
RiskReply parse_risk_reply(const std::string& raw);

// The four deterministic hard gates, evaluated before any backend call:
// G1 directional signal, G2 confidence floor, G3 stop distance cap,
// G4 position size cap.
GateResults hard_gates(const AnalystProposal& p, const RiskConfig& cfg);

}  // namespace sentra
