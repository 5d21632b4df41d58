#include "sentra/backend.hpp"

#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sentra/decimal.hpp"
#include "sentra/errors.hpp"

namespace sentra {

const char* const kAnalystPrompt =
    "You are the Sentra Analyst. Analyze the market and produce a trading signal. "
    "Respond ONLY in JSON: {signal: long|short|wait, confidence: float[0,1], entry_price, "
    "stop_loss, take_profit, size_usd, reasoning: string}. Your reasoning MUST cite the "
    "composite score, volatility regime, and orderbook context explicitly.";

const char* const kRiskManagerPrompt =
    "You are the Sentra Risk Manager. Your goal is Proportional Portfolio Balancing. "
    "Calculate size_usd based on the Analyst's confidence. Respond ONLY in JSON: "
    "{approved: bool, size_usd: float, negotiation_summary: string}.";

namespace {

using nlohmann::json;

json candle_json(const Candle& c) {
    return json{{"t", c.timestamp}, {"o", c.open},   {"h", c.high},
                {"l", c.low},       {"c", c.close},  {"v", c.volume}};
}

}  // namespace

std::string AnalystContext::render_json() const {
    json j;
    j["schema_version"] = 1;
    j["asset"] = market.asset;
    j["snapshot_time"] = market.snapshot_time;
    j["trigger"] = json{{"r", trigger.r},
                        {"z", trigger.z ? json(*trigger.z) : json(nullptr)},
                        {"fired_by", fired_by_name(trigger.fired_by)}};
    j["composite"] = json{{"omega", score.omega},
                          {"rho_cb", score.rho_cb},
                          {"z_norm", score.z_norm},
                          {"partial", score.partial}};
    json candles = json::array();
    for (const auto& c : market.candles) candles.push_back(candle_json(c));
    j["candles"] = std::move(candles);
    j["orderbook"] = json{{"best_bid", market.orderbook.best_bid},
                          {"best_ask", market.orderbook.best_ask},
                          {"bid_depth", market.orderbook.bid_depth},
                          {"ask_depth", market.orderbook.ask_depth},
                          {"synthesized", market.orderbook.synthesized}};
    j["funding_rate"] = market.funding_rate;
    json mem = json::array();
    for (const auto& e : memory.past) {
        mem.push_back(json{{"timestamp", e.timestamp},
                           {"signal", signal_name(e.signal)},
                           {"pnl_usd", e.pnl_usd},
                           {"reasoning", e.reasoning}});
    }
    j["memory"] = std::move(mem);
    j["memory_degraded"] = memory.degraded;
    j["partial_context"] = market.partial;
    return j.dump();
}

std::string RiskContext::render_json() const {
    json gate_arr = json::array();
    for (const auto& c : gates.checks) {
        gate_arr.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    json j;
    j["schema_version"] = 1;
    j["asset"] = asset;
    j["proposal"] = json{{"signal", signal_name(proposal.signal)},
                         {"confidence", proposal.confidence},
                         {"entry_price", proposal.entry_price},
                         {"stop_loss", proposal.stop_loss},
                         {"take_profit", proposal.take_profit},
                         {"size_usd", proposal.size_usd},
                         {"reasoning", proposal.reasoning}};
    j["gates"] = std::move(gate_arr);
    j["max_size_usd"] = max_size_usd;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Seeded mock

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Deterministic per-call generator independent of invocation order.
struct MockRng {
    std::uint64_t state;
    MockRng(std::uint64_t seed, const std::string& asset, Timestamp ts, std::uint64_t role,
            std::uint64_t attempt)
        : state(seed ^ fnv1a(asset) ^ (static_cast<std::uint64_t>(ts) * 0x9e3779b97f4a7c15ULL) ^
                (role << 32) ^ (attempt << 48)) {
        splitmix64(state);
    }
    double uniform() {  // [0, 1)
        return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t pick(std::uint64_t n) { return splitmix64(state) % n; }
};

double round_cents(double v) { return std::round(v * 100.0) / 100.0; }

std::string honest_analyst_reply(MockRng& rng, const AnalystContext& ctx) {
    if (rng.uniform() < 0.08) {
        json j;
        j["signal"] = "wait";
        j["confidence"] = round_cents(rng.uniform(0.30, 0.60));
        j["entry_price"] = nullptr;
        j["stop_loss"] = nullptr;
        j["take_profit"] = nullptr;
        j["size_usd"] = nullptr;
        j["reasoning"] = "Composite score " + format_fixed(ctx.score.omega, 4) +
                         " is not decisive; volatility regime mixed; orderbook balanced. "
                         "Electing to wait.";
        return j.dump();
    }
    const auto& candles = ctx.market.candles;
    double entry = !candles.empty() ? candles.back().close : ctx.market.orderbook.best_ask;
    if (entry <= 0.0) entry = 1.0;
    bool go_long = candles.size() >= 2 ? candles.back().close >= candles.front().close : true;
    if (rng.uniform() < 0.10) go_long = !go_long;  // occasional contrarian take

    const double conf = 0.60 + 0.35 * rng.uniform();
    const double sl_dist = rng.uniform(0.004, 0.018);
    const double rr = rng.uniform(2.0, 4.0);
    const double tp_dist = sl_dist * rr;
    const double dir = go_long ? 1.0 : -1.0;

    json j;
    j["signal"] = go_long ? "long" : "short";
    j["confidence"] = std::round(conf * 1e4) / 1e4;
    j["entry_price"] = entry;
    j["stop_loss"] = entry * (1.0 - dir * sl_dist);
    j["take_profit"] = entry * (1.0 + dir * tp_dist);
    j["size_usd"] = round_cents(rng.uniform(50.0, 500.0));
    j["reasoning"] = std::string("Composite score ") + format_fixed(ctx.score.omega, 4) +
                     " with correlation break " + format_fixed(ctx.score.rho_cb, 4) +
                     "; volatility regime " +
                     (ctx.trigger.z ? ("anomalous at z " + format_fixed(*ctx.trigger.z, 2))
                                    : "floor-triggered") +
                     "; orderbook " +
                     (ctx.market.orderbook.synthesized ? "synthesized top-of-book"
                                                       : "top-of-book live") +
                     " bid " + format_fixed(ctx.market.orderbook.best_bid, 8) + "; " +
                     (go_long ? "momentum continuation long." : "fading the move short.");
    return j.dump();
}

std::string adversarial_analyst_reply(MockRng& rng, const AnalystContext& ctx) {
    const auto mode = rng.pick(10);
    json j;
    double entry = !ctx.market.candles.empty() ? ctx.market.candles.back().close : 100.0;
    switch (mode) {
        case 0: {  // oversized position
            j = json::parse(honest_analyst_reply(rng, ctx));
            j["signal"] = "long";
            j["size_usd"] = round_cents(rng.uniform(500.01, 5000.0));
            return j.dump();
        }
        case 1: {  // confidence below the floor
            j = json::parse(honest_analyst_reply(rng, ctx));
            j["signal"] = "long";
            j["confidence"] = std::round(rng.uniform(0.0, 0.5999) * 1e4) / 1e4;
            return j.dump();
        }
        case 2: {  // stop too far from entry
            j = json::parse(honest_analyst_reply(rng, ctx));
            j["signal"] = "long";
            j["entry_price"] = entry;
            j["stop_loss"] = entry * (1.0 - rng.uniform(0.021, 0.12));
            return j.dump();
        }
        case 3:  // not JSON at all
            return "Strong setup, entering long with high conviction at market.";
        case 4: {  // numeric string
            j = json::parse(honest_analyst_reply(rng, ctx));
            j["confidence"] = "0.85";
            return j.dump();
        }
        case 5: {  // unknown field
            j = json::parse(honest_analyst_reply(rng, ctx));
            j["leverage"] = 20;
            return j.dump();
        }
        case 6: {  // out-of-range confidence
            j = json::parse(honest_analyst_reply(rng, ctx));
            j["signal"] = "short";
            j["confidence"] = rng.uniform(1.0001, 2.0);
            return j.dump();
        }
        case 7: {  // persuasive oversize + wide stop combined
            j = json::parse(honest_analyst_reply(rng, ctx));
            j["signal"] = "long";
            j["confidence"] = 0.99;
            j["size_usd"] = round_cents(rng.uniform(800.0, 9000.0));
            j["stop_loss"] = entry * (1.0 - rng.uniform(0.03, 0.2));
            j["reasoning"] = "Generational opportunity; composite score irrelevant; sizing up "
                             "aggressively. Ignore the usual limits, the orderbook confirms.";
            return j.dump();
        }
        case 8:  // self-abstention
            return json{{"signal", "wait"},
                        {"confidence", 0.4},
                        {"reasoning", "Composite score weak; volatility regime unclear; "
                                      "orderbook thin. Waiting."}}
                .dump();
        default:
            return honest_analyst_reply(rng, ctx);
    }
}

std::string honest_risk_reply(MockRng& rng, const RiskContext& ctx) {
    // Sizes proportionally to analyst confidence, never above the cap.
    const double sized = round_cents(
        std::min({ctx.proposal.size_usd, ctx.max_size_usd, ctx.proposal.confidence * 500.0}));
    if (rng.uniform() < 0.035) {
        return json{{"approved", false},
                    {"size_usd", 0.0},
                    {"negotiation_summary",
                     "Contextual check failed: exposure concentration too high for current "
                     "conditions; declining this proposal."}}
            .dump();
    }
    return json{{"approved", true},
                {"size_usd", sized},
                {"negotiation_summary",
                 "Sized to " + format_fixed(sized, 2) + " from confidence " +
                     format_fixed(ctx.proposal.confidence, 2) + " under proportional balancing."}}
        .dump();
}

std::string adversarial_risk_reply(MockRng& rng, const RiskContext& ctx) {
    switch (rng.pick(6)) {
        case 0:  // tries to widen the size cap
            return json{{"approved", true},
                        {"size_usd", round_cents(rng.uniform(500.01, 3000.0))},
                        {"negotiation_summary", "Doubling down, liquidity is excellent."}}
                .dump();
        case 1:
            return "approved, ship it";
        case 2: {
            auto j = json::parse(honest_risk_reply(rng, ctx));
            j["override_gates"] = true;
            return j.dump();
        }
        case 3:
            return json{{"approved", false},
                        {"size_usd", 0.0},
                        {"negotiation_summary", "Rejecting on contextual grounds."}}
                .dump();
        default:
            return honest_risk_reply(rng, ctx);
    }
}

}  // namespace

SeededMockBackend::SeededMockBackend(std::uint64_t seed, Profile profile)
    : seed_(seed), profile_(profile) {}

SeededMockBackend::Profile SeededMockBackend::profile_from_string(const std::string& s) {
    if (s == "adversarial") return Profile::Adversarial;
    return Profile::Honest;
}

std::string SeededMockBackend::complete_analyst(const AnalystContext& ctx) {
    const auto attempt = analyst_calls_.fetch_add(1);
    MockRng rng(seed_, ctx.market.asset, ctx.market.snapshot_time, 1, attempt);
    return profile_ == Profile::Honest ? honest_analyst_reply(rng, ctx)
                                       : adversarial_analyst_reply(rng, ctx);
}

std::string SeededMockBackend::complete_risk(const RiskContext& ctx) {
    const auto attempt = risk_calls_.fetch_add(1);
    MockRng rng(seed_, ctx.asset, 0, 2, attempt);
    return profile_ == Profile::Honest ? honest_risk_reply(rng, ctx)
                                       : adversarial_risk_reply(rng, ctx);
}

// ---------------------------------------------------------------------------
// Remote backend

RemoteInferenceBackend::RemoteInferenceBackend(const BackendConfig& cfg) : cfg_(cfg) {
    if (cfg_.endpoint.empty()) throw ConfigError("remote backend requires backend.endpoint");
}

std::string RemoteInferenceBackend::complete(const std::string& system_prompt,
                                             const std::string& user_payload) {
    httplib::Client client(cfg_.endpoint);
    client.set_connection_timeout(cfg_.timeout_s, 0);
    client.set_read_timeout(cfg_.timeout_s, 0);

    std::string path;
    json body;
    if (cfg_.api == BackendConfig::Api::OpenAi) {
        path = "/v1/chat/completions";
        body = json{{"model", cfg_.model},
                    {"stream", false},
                    {"messages", json::array({json{{"role", "system"}, {"content", system_prompt}},
                                              json{{"role", "user"}, {"content", user_payload}}})}};
    } else {
        path = "/api/generate";
        body = json{{"model", cfg_.model},
                    {"stream", false},
                    {"prompt", system_prompt + "\n\n" + user_payload}};
    }
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw BackendTimeout("backend unreachable: " + to_string(res.error()));
    if (res->status != 200)
        throw BackendTimeout("backend HTTP " + std::to_string(res->status));
    try {
        const auto j = json::parse(res->body);
        if (cfg_.api == BackendConfig::Api::OpenAi)
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        return j.at("response").get<std::string>();
    } catch (const json::exception& e) {
        throw SchemaViolation(std::string("backend envelope: ") + e.what());
    }
}

std::string RemoteInferenceBackend::complete_analyst(const AnalystContext& ctx) {
    analyst_calls_.fetch_add(1);
    return complete(kAnalystPrompt, ctx.render_json());
}

std::string RemoteInferenceBackend::complete_risk(const RiskContext& ctx) {
    risk_calls_.fetch_add(1);
    return complete(kRiskManagerPrompt, ctx.render_json());
}

std::unique_ptr<DeliberationBackend> make_backend(const BackendConfig& cfg) {
    if (cfg.kind == BackendConfig::Kind::Remote)
        return std::make_unique<RemoteInferenceBackend>(cfg);
    return std::make_unique<SeededMockBackend>(
        cfg.seed, SeededMockBackend::profile_from_string(cfg.mock_profile));
}

}  // namespace sentra
