#pragma once

// Monte-Carlo estimate of the one-step potential drift of the idealized
// recycled chain (every ball has a unique color and is re-thrown as soon as
// it is removed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "arcane/models/balls_into_bins.hpp"

namespace arcane::models {

struct DriftEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t trials = 0;
    Count overfull_bins = 0;
};

/// Y_{t+1} - Y_t for one step from `loads`: each bin serves one ball; a
/// ball served from a bin at or below tau returns to it, a ball served from
/// an overfull bin (and every throw owed to an empty bin) lands uniformly.
template <class Gen>
std::int64_t sample_drift(std::span<const Count> loads, Count tau, Gen& rng) {
    const std::size_t n = loads.size();
    std::vector<Count> next(loads.begin(), loads.end());
    Count random_throws = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (next[i] == 0) {
            ++random_throws;
            continue;
        }
        if (loads[i] > tau) {
            --next[i];
            ++random_throws;
        }
    }
    for (Count t = 0; t < random_throws; ++t) ++next[uniform_below(rng, n)];
    return static_cast<std::int64_t>(potential(next, tau)) - static_cast<std::int64_t>(potential(loads, tau));
}

template <class Gen>
DriftEstimate drift_estimate(std::span<const Count> loads, Count tau, std::uint64_t trials, Gen& rng) {
    if (trials < 2) throw std::invalid_argument("drift: need at least two trials");
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double d = static_cast<double>(sample_drift(loads, tau, rng));
        sum += d;
        sum_sq += d * d;
    }
    DriftEstimate e;
    e.trials = trials;
    e.mean = sum / static_cast<double>(trials);
    const double var = (sum_sq - sum * e.mean) / static_cast<double>(trials - 1);
    e.stderr_ = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
    for (Count x : loads) e.overfull_bins += x > tau;
    return e;
}

/// Largest ball count allowed at the start of the second phase: 2 n ln n + n.
inline Count second_phase_ball_budget(std::size_t n) {
    const double nn = static_cast<double>(n);
    return static_cast<Count>(std::floor(2.0 * nn * std::log(nn) + nn));
}

/// Random second-phase configuration: all bins non-empty, `overfull` bins
/// above tau, total within `budget`. Returns an empty vector if infeasible.
template <class Gen>
std::vector<Count> sample_second_phase(std::size_t n, Count tau, Count overfull, Count budget, Gen& rng) {
    if (overfull > n) return {};
    const Count floor_total = overfull * (tau + 1) + (n - overfull);
    if (floor_total > budget) return {};
    std::vector<Count> loads(n, 1);
    for (Count i = 0; i < overfull; ++i) loads[i] = tau + 1;
    Count spare = uniform_below(rng, budget - floor_total + 1);
    std::vector<std::size_t> eligible;
    while (spare > 0) {
        eligible.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j < overfull || loads[j] < tau) eligible.push_back(j);
        if (eligible.empty()) break;
        ++loads[eligible[uniform_below(rng, eligible.size())]];
        --spare;
    }
    std::shuffle(loads.begin(), loads.end(), rng);
    return loads;
}

/// Worst case for the drift bound within the budget: `overfull` bins at
/// tau + 1, as many bins as possible exactly at tau, the rest at one ball.
inline std::vector<Count> adversarial_second_phase(std::size_t n, Count tau, Count overfull, Count budget) {
    const Count floor_total = overfull * (tau + 1) + (n - overfull);
    if (overfull > n || floor_total > budget) return {};
    std::vector<Count> loads(n, 1);
    for (Count i = 0; i < overfull; ++i) loads[i] = tau + 1;
    Count spare = budget - floor_total;
    for (std::size_t i = overfull; i < n && spare >= tau - 1; ++i) {
        loads[i] = tau;
        spare -= tau - 1;
    }
    return loads;
}

}  // namespace arcane::models
