#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "arcane/net/ecmp.hpp"
#include "arcane/util/rng.hpp"

namespace arcane::models {

struct ImbalanceSummary {
    double mean = 0, min = 0, p50 = 0, p90 = 0, p99 = 0, max = 0;
    std::size_t trials = 0;
};

/// lambda = l / (m / n) - 1 with l the fullest bin.
inline double load_imbalance(const std::vector<std::uint64_t>& bins) {
    std::uint64_t m = 0, l = 0;
    for (auto b : bins) {
        m += b;
        l = std::max(l, b);
    }
    if (m == 0) return 0.0;
    return static_cast<double>(l) * static_cast<double>(bins.size()) / static_cast<double>(m) - 1.0;
}

/// One trial: fresh switch hash seed and random flow headers; every flow
/// hashes each of its `evs_size` EVs onto an uplink.
template <class Gen>
double evs_trial(std::uint32_t flows, std::uint32_t evs_size, std::uint32_t uplinks, Gen& rng) {
    const net::EcmpHasher hasher{rng()};
    std::vector<std::uint64_t> bins(uplinks, 0);
    for (std::uint32_t f = 0; f < flows; ++f) {
        const auto src = static_cast<net::NodeId>(rng());
        const auto dst = static_cast<net::NodeId>(rng());
        const auto key = hasher.flow_key(src, dst, static_cast<net::FlowId>(rng()));
        for (std::uint32_t ev = 0; ev < evs_size; ++ev) ++bins[net::EcmpHasher::select_keyed(key, ev, uplinks)];
    }
    return load_imbalance(bins);
}

inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

template <class Gen>
ImbalanceSummary evs_load_imbalance(std::uint32_t flows, std::uint32_t evs_size, std::uint32_t uplinks,
                                    std::size_t trials, Gen& rng) {
    if (uplinks < 1) throw std::invalid_argument("evs: uplinks must be >= 1");
    if (evs_size < 1) throw std::invalid_argument("evs: EVS size must be >= 1");
    if (flows < 1) throw std::invalid_argument("evs: need at least one flow");
    if (trials < 1) throw std::invalid_argument("evs: need at least one trial");
    std::vector<double> xs;
    xs.reserve(trials);
    double sum = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        xs.push_back(evs_trial(flows, evs_size, uplinks, rng));
        sum += xs.back();
    }
    std::sort(xs.begin(), xs.end());
    ImbalanceSummary s;
    s.trials = trials;
    s.mean = sum / static_cast<double>(trials);
    s.min = xs.front();
    s.max = xs.back();
    s.p50 = quantile_sorted(xs, 0.5);
    s.p90 = quantile_sorted(xs, 0.9);
    s.p99 = quantile_sorted(xs, 0.99);
    return s;
}

}  // namespace arcane::models
