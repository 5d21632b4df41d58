#include "sentra/gate.hpp"

#include <cinttypes>
#include <cstdio>

namespace sentra {

namespace {

nlohmann::json trigger_payload(const TriggerEvent& t) {
    nlohmann::json j;
    j["asset"] = t.asset;
    j["r"] = t.r;
    j["z"] = t.z ? nlohmann::json(*t.z) : nlohmann::json(nullptr);
    j["fired_by"] = fired_by_name(t.fired_by);
    j["omega"] = t.omega ? nlohmann::json(*t.omega) : nlohmann::json(nullptr);
    return j;
}

}  // namespace

InferenceGate::InferenceGate(const GateConfig& cfg, Journal* journal)
    : cfg_(cfg), journal_(journal) {}

GateDecision InferenceGate::try_admit(const TriggerEvent& trigger, Timestamp now) {
    std::lock_guard<std::mutex> lk(mu_);

    if (locked_ && cfg_.watchdog_s > 0 && now - acquired_at_ >= cfg_.watchdog_s) {
        // Stuck holder: force-release so the protocol cannot deadlock.
        if (journal_) {
            nlohmann::json j;
            j["stale_holder"] = holder_;
            j["held_s"] = now - acquired_at_;
            journal_->append_log(now, holder_, event::kForcedRelease, j);
        }
        locked_ = false;
        holder_.clear();
        last_release_at_ = now;
        ++forced_releases_;
    }

    GateDecision d;
    if (locked_) {
        d.reason = GateDecision::Reason::PipelineBusy;
        ++busy_discards_;
        if (journal_) {
            auto j = trigger_payload(trigger);
            j["holder"] = holder_;
            journal_->append_log(now, std::nullopt, event::kPipelineBusy, j);
        }
        return d;
    }
    if (last_release_at_ && now - *last_release_at_ < cfg_.cooldown_s) {
        d.reason = GateDecision::Reason::CooldownActive;
        ++cooldown_discards_;
        if (journal_) {
            auto j = trigger_payload(trigger);
            j["remaining_s"] = cfg_.cooldown_s - (now - *last_release_at_);
            journal_->append_log(now, std::nullopt, event::kCooldownActive, j);
        }
        return d;
    }

    char id[32];
    std::snprintf(id, sizeof(id), "inv-%06" PRIu64, ++admit_seq_);
    locked_ = true;
    holder_ = id;
    acquired_at_ = now;
    ++admitted_;

    d.admitted = true;
    d.reason = GateDecision::Reason::Admitted;
    d.invocation_id = holder_;
    if (journal_) {
        auto j = trigger_payload(trigger);
        j["acquired_at"] = now;
        journal_->append_log(now, holder_, event::kPipelineStart, j);
    }
    return d;
}

bool InferenceGate::release(const std::string& invocation_id, Timestamp now,
                            const nlohmann::json& outcome) {
    std::lock_guard<std::mutex> lk(mu_);
    if (!locked_ || holder_ != invocation_id) {
        if (journal_) {
            nlohmann::json j;
            j["attempted_by"] = invocation_id;
            j["holder"] = locked_ ? holder_ : "";
            j["violation"] = "foreign_release";
            journal_->append_log(now, invocation_id, event::kProtocolViolation, j);
        }
        return false;
    }
    locked_ = false;
    holder_.clear();
    last_release_at_ = now;
    if (journal_) {
        auto j = outcome;
        j["released_at"] = now;
        journal_->append_log(now, invocation_id, event::kPipelineComplete, j);
    }
    return true;
}

InferenceGate::Snapshot InferenceGate::snapshot() const {
    std::lock_guard<std::mutex> lk(mu_);
    Snapshot s;
    s.locked = locked_;
    s.holder = holder_;
    s.acquired_at = acquired_at_;
    s.last_release_at = last_release_at_;
    s.admitted = admitted_;
    s.busy_discards = busy_discards_;
    s.cooldown_discards = cooldown_discards_;
    s.forced_releases = forced_releases_;
    return s;
}

}  // namespace sentra
