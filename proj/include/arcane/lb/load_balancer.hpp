#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "arcane/core/arcane_state.hpp"
#include "arcane/util/rng.hpp"

namespace arcane::lb {

enum class Kind { arcane, ops, ecmp };

inline std::string_view to_string(Kind k) {
    switch (k) {
        case Kind::arcane: return "arcane";
        case Kind::ops: return "ops";
        case Kind::ecmp: return "ecmp";
    }
    return "?";
}

inline Kind parse_kind(std::string_view s) {
    if (s == "arcane") return Kind::arcane;
    if (s == "ops") return Kind::ops;
    if (s == "ecmp") return Kind::ecmp;
    throw std::invalid_argument("unknown load balancer '" + std::string(s) + "' (expected arcane|ops|ecmp)");
}

/// Per-connection EV selection policy.
class LoadBalancer {
public:
    virtual ~LoadBalancer() = default;
    virtual Kind kind() const noexcept = 0;
    virtual EntropyValue pick_ev(Rng& rng, TimeNs now) = 0;
    virtual void notify_ack(EntropyValue carried_ev, bool ecn, TimeNs now) = 0;
    virtual void notify_failure(TimeNs now) = 0;
    virtual void tick(TimeNs) {}
};

class OpsBalancer final : public LoadBalancer {
public:
    explicit OpsBalancer(std::uint32_t evs_size) : evs_size_(evs_size) {}
    Kind kind() const noexcept override { return Kind::ops; }
    EntropyValue pick_ev(Rng& rng, TimeNs) override {
        return static_cast<EntropyValue>(uniform_below(rng, evs_size_));
    }
    void notify_ack(EntropyValue, bool, TimeNs) override {}
    void notify_failure(TimeNs) override {}

private:
    std::uint32_t evs_size_;
};

class EcmpBalancer final : public LoadBalancer {
public:
    EcmpBalancer(std::uint32_t evs_size, std::uint64_t seed, std::uint32_t flow)
        : ev_(static_cast<EntropyValue>(combine(seed, flow) % evs_size)) {}
    Kind kind() const noexcept override { return Kind::ecmp; }
    EntropyValue pick_ev(Rng&, TimeNs) override { return ev_; }
    void notify_ack(EntropyValue, bool, TimeNs) override {}
    void notify_failure(TimeNs) override {}

private:
    EntropyValue ev_;
};

class ArcaneBalancer final : public LoadBalancer {
public:
    explicit ArcaneBalancer(const ArcaneConfig& config) : state_(config) {}
    Kind kind() const noexcept override { return Kind::arcane; }
    EntropyValue pick_ev(Rng& rng, TimeNs) override { return state_.on_send(rng); }
    void notify_ack(EntropyValue carried_ev, bool ecn, TimeNs now) override { state_.on_ack(carried_ev, ecn, now); }
    void notify_failure(TimeNs now) override { state_.on_failure_detection(now); }
    void tick(TimeNs now) override { state_.tick(now); }

    const ArcaneState& state() const noexcept { return state_; }

private:
    ArcaneState state_;
};

struct BalancerSettings {
    Kind kind = Kind::arcane;
    ArcaneConfig arcane;  // evs_size here applies to every kind
};

inline std::unique_ptr<LoadBalancer> make_balancer(const BalancerSettings& s, std::uint64_t seed, std::uint32_t flow) {
    switch (s.kind) {
        case Kind::arcane: return std::make_unique<ArcaneBalancer>(s.arcane);
        case Kind::ops: return std::make_unique<OpsBalancer>(s.arcane.evs_size);
        case Kind::ecmp: return std::make_unique<EcmpBalancer>(s.arcane.evs_size, seed, flow);
    }
    throw std::logic_error("unreachable");
}

}  // namespace arcane::lb
