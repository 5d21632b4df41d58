#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "sentra/config.hpp"
#include "sentra/contracts.hpp"
#include "sentra/divergence.hpp"
#include "sentra/trigger.hpp"
#include "sentra/types.hpp"

namespace sentra {

// Agent prompt templates. Kept byte-identical to assets/prompts/*.txt (a
// unit test pins the equality).
extern const char* const kAnalystPrompt;
extern const char* const kRiskManagerPrompt;

// Structured input for the analyst call; serialized with a canonical,
// versioned layout (see render_json).
struct AnalystContext {
    MarketContext market;
    DivergenceScore score;
    TriggerEvent trigger;
    MemoryBriefing memory;

    std::string render_json() const;
};

// Structured input for the risk-manager contextual check (layer B).
struct RiskContext {
    std::string asset;
    AnalystProposal proposal;
    GateResults gates;
    double max_size_usd = 500.0;

    std::string render_json() const;
};

/**
 * @brief Pluggable deliberation backend: exactly two calls, each returning
 * raw text that the pipeline schema-validates.
 */
class DeliberationBackend {
public:
    virtual ~DeliberationBackend() = default;
    virtual std::string complete_analyst(const AnalystContext& ctx) = 0;
    virtual std::string complete_risk(const RiskContext& ctx) = 0;

    std::uint64_t analyst_calls() const { return analyst_calls_.load(); }
    std::uint64_t risk_calls() const { return risk_calls_.load(); }

protected:
    std::atomic<std::uint64_t> analyst_calls_{0};
    std::atomic<std::uint64_t> risk_calls_{0};
};

/**
 * @brief Deterministic rule-driven backend.
 *
 * Outputs are a pure function of (seed, asset, timestamp, attempt), so a
 * replayed session reproduces the same deliberations byte for byte. The
 * adversarial profile mixes in malformed and gate-violating replies to
 * exercise every rejection path.
 */
class SeededMockBackend : public DeliberationBackend {
public:
    enum class Profile { Honest, Adversarial };

    SeededMockBackend(std::uint64_t seed, Profile profile = Profile::Honest);

    std::string complete_analyst(const AnalystContext& ctx) override;
    std::string complete_risk(const RiskContext& ctx) override;

    static Profile profile_from_string(const std::string& s);

private:
    std::uint64_t seed_;
    Profile profile_;
};

// HTTP JSON client for an OpenAI- or Ollama-style completion endpoint.
class RemoteInferenceBackend : public DeliberationBackend {
public:
    explicit RemoteInferenceBackend(const BackendConfig& cfg);

    std::string complete_analyst(const AnalystContext& ctx) override;
    std::string complete_risk(const RiskContext& ctx) override;

private:
    std::string complete(const std::string& system_prompt, const std::string& user_payload);
    BackendConfig cfg_;
};

std::unique_ptr<DeliberationBackend> make_backend(const BackendConfig& cfg);

}  // namespace sentra
