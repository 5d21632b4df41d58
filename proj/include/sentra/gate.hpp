#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "sentra/config.hpp"
#include "sentra/journal.hpp"
#include "sentra/trigger.hpp"

namespace sentra {

struct GateDecision {
    bool admitted = false;
    enum class Reason { Admitted, PipelineBusy, CooldownActive } reason = Reason::PipelineBusy;
    std::string invocation_id;  // set when admitted
};

inline const char* gate_reason_name(GateDecision::Reason r) {
    switch (r) {
        case GateDecision::Reason::Admitted: return "admitted";
        case GateDecision::Reason::PipelineBusy: return "pipeline_busy";
        default: return "cooldown_active";
    }
}

/**
 * @brief Binary admission lock serializing deliberation.
 *
 * try_admit / release are linearizable (single internal mutex). A refused
 * trigger is discarded, never queued, and every decision is journaled:
 * pipeline_start, pipeline_busy or cooldown_active. A watchdog force-releases
 * a holder that exceeds its wall-clock ceiling so the lock cannot deadlock.
 */
class InferenceGate {
public:
    InferenceGate(const GateConfig& cfg, Journal* journal);

    // Atomic test-and-set. Admitted iff the lock is free and the cooldown
    // since the previous release has elapsed.
    GateDecision try_admit(const TriggerEvent& trigger, Timestamp now);

    // Releases the lock; `outcome` is journaled with the pipeline_complete
    // event. Returns false (and journals a protocol violation) when the
    // caller is not the holder.
    bool release(const std::string& invocation_id, Timestamp now,
                 const nlohmann::json& outcome = nlohmann::json::object());

    struct Snapshot {
        bool locked = false;
        std::string holder;
        Timestamp acquired_at = 0;
        std::optional<Timestamp> last_release_at;
        std::uint64_t admitted = 0;
        std::uint64_t busy_discards = 0;
        std::uint64_t cooldown_discards = 0;
        std::uint64_t forced_releases = 0;
    };
    Snapshot snapshot() const;

private:
    GateConfig cfg_;
    Journal* journal_;
    mutable std::mutex mu_;
    bool locked_ = false;
    std::string holder_;
    Timestamp acquired_at_ = 0;
    std::optional<Timestamp> last_release_at_;
    std::uint64_t admit_seq_ = 0;
    std::uint64_t admitted_ = 0;
    std::uint64_t busy_discards_ = 0;
    std::uint64_t cooldown_discards_ = 0;
    std::uint64_t forced_releases_ = 0;
};

// Scope guard: releases the admission on destruction unless already released,
// so every pipeline exit path (including exceptions) frees the lock.
class Admission {
public:
    Admission(InferenceGate& gate, std::string invocation_id, std::function<Timestamp()> now_fn)
        : gate_(&gate), invocation_id_(std::move(invocation_id)), now_fn_(std::move(now_fn)) {}
    Admission(Admission&& other) noexcept { *this = std::move(other); }
    Admission& operator=(Admission&& other) noexcept {
        gate_ = other.gate_;
        invocation_id_ = std::move(other.invocation_id_);
        now_fn_ = std::move(other.now_fn_);
        outcome_ = std::move(other.outcome_);
        other.gate_ = nullptr;
        return *this;
    }
    Admission(const Admission&) = delete;
    Admission& operator=(const Admission&) = delete;

    ~Admission() { release(); }

    void set_outcome(nlohmann::json outcome) { outcome_ = std::move(outcome); }
    void release() {
        if (gate_) {
            gate_->release(invocation_id_, now_fn_(), outcome_);
            gate_ = nullptr;
        }
    }
    const std::string& id() const { return invocation_id_; }

private:
    InferenceGate* gate_ = nullptr;
    std::string invocation_id_;
    std::function<Timestamp()> now_fn_;
    nlohmann::json outcome_ = nlohmann::json::object();
};

}  // namespace sentra
