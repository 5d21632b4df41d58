#include "sentra/contracts.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "sentra/decimal.hpp"
#include "sentra/errors.hpp"

namespace sentra {

namespace {

using nlohmann::json;

json parse_object(const std::string& raw, const std::set<std::string>& allowed) {
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::exception& e) {
        throw SchemaViolation(std::string("invalid_json: ") + e.what());
    }
    if (!j.is_object()) throw SchemaViolation("root is not an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw SchemaViolation("unknown_field: " + key);
    }
    return j;
}

// Numbers must be JSON numbers; "0.8" the string is rejected.
double require_number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw SchemaViolation("missing_field: " + key);
    const auto& v = j.at(key);
    if (!v.is_number()) throw SchemaViolation("not_a_number: " + key);
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaViolation("not_finite: " + key);
    return d;
}

std::string require_string(const json& j, const std::string& key) {
    if (!j.contains(key)) throw SchemaViolation("missing_field: " + key);
    const auto& v = j.at(key);
    if (!v.is_string()) throw SchemaViolation("not_a_string: " + key);
    return v.get<std::string>();
}

std::optional<double> optional_number(const json& j, const std::string& key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number()) throw SchemaViolation("not_a_number: " + key);
    const double d = j.at(key).get<double>();
    if (!std::isfinite(d)) throw SchemaViolation("not_finite: " + key);
    return d;
}

}  // namespace

AnalystProposal parse_analyst_proposal(const std::string& raw) {
    const auto j = parse_object(raw, {"signal", "confidence", "entry_price", "stop_loss",
                                      "take_profit", "size_usd", "reasoning"});
    AnalystProposal p;
    const auto sig = signal_from_string(require_string(j, "signal"));
    if (!sig) throw SchemaViolation("bad_enum: signal");
    p.signal = *sig;
    p.confidence = require_number(j, "confidence");
    if (p.confidence < 0.0 || p.confidence > 1.0) throw SchemaViolation("out_of_range: confidence");
    p.reasoning = require_string(j, "reasoning");
    if (p.reasoning.empty()) throw SchemaViolation("empty_field: reasoning");

    if (p.signal == Signal::Wait) {
        // Price fields are optional for a self-abstention.
        p.entry_price = optional_number(j, "entry_price").value_or(0.0);
        p.stop_loss = optional_number(j, "stop_loss").value_or(0.0);
        p.take_profit = optional_number(j, "take_profit").value_or(0.0);
        p.size_usd = optional_number(j, "size_usd").value_or(0.0);
        return p;
    }
    p.entry_price = require_number(j, "entry_price");
    p.stop_loss = require_number(j, "stop_loss");
    p.take_profit = require_number(j, "take_profit");
    p.size_usd = require_number(j, "size_usd");
    if (p.entry_price <= 0.0) throw SchemaViolation("out_of_range: entry_price");
    if (p.stop_loss <= 0.0) throw SchemaViolation("out_of_range: stop_loss");
    if (p.take_profit <= 0.0) throw SchemaViolation("out_of_range: take_profit");
    if (p.size_usd <= 0.0) throw SchemaViolation("out_of_range: size_usd");
    return p;
}

RiskReply parse_risk_reply(const std::string& raw) {
    const auto j = parse_object(raw, {"approved", "size_usd", "negotiation_summary"});
    RiskReply r;
    if (!j.contains("approved") || !j.at("approved").is_boolean())
        throw SchemaViolation("missing_or_bad: approved");
    r.approved = j.at("approved").get<bool>();
    r.size_usd = require_number(j, "size_usd");
    if (r.size_usd < 0.0) throw SchemaViolation("out_of_range: size_usd");
    r.negotiation_summary = require_string(j, "negotiation_summary");
    return r;
}

GateResults hard_gates(const AnalystProposal& p, const RiskConfig& cfg) {
    GateResults g;

    const bool directional = p.signal == Signal::Long || p.signal == Signal::Short;
    g.checks[0] = {"signal_directional", directional,
                   std::string("signal=") + signal_name(p.signal)};

    const bool conf_ok = p.confidence >= cfg.confidence_gate;
    g.checks[1] = {"confidence_floor", conf_ok,
                   "confidence=" + format_fixed(p.confidence, 4) +
                       " min=" + format_fixed(cfg.confidence_gate, 4)};

    double stop_dist = 0.0;
    bool stop_ok = false;
    if (p.entry_price > 0.0) {
        stop_dist = std::fabs(p.entry_price - p.stop_loss) / p.entry_price;
        stop_ok = stop_dist <= cfg.max_risk_pct;
    }
    g.checks[2] = {"stop_distance", stop_ok,
                   "dist=" + format_fixed(stop_dist, 6) +
                       " max=" + format_fixed(cfg.max_risk_pct, 6)};

    const bool size_ok = p.size_usd <= cfg.max_size_usd;
    g.checks[3] = {"position_size", size_ok,
                   "size=" + format_fixed(p.size_usd, 2) +
                       " max=" + format_fixed(cfg.max_size_usd, 2)};
    return g;
}

}  // namespace sentra
