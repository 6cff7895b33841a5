#pragma once

// Batched balls-into-bins (oblivious spraying at a single switch) and the
// recycled variant in which ball colors remember bins that stayed below a
// threshold.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcane/util/rng.hpp"

namespace arcane::models {

using Count = std::uint64_t;

struct PotentialRecord {
    Count round = 0;
    Count potential = 0;     // sum_i max(0, load_i - tau)
    Count overfull_bins = 0; // bins with load > tau
    Count max_load = 0;
    Count total_balls = 0;
};

inline Count potential(std::span<const Count> loads, Count tau) {
    Count y = 0;
    for (Count x : loads) y += x > tau ? x - tau : 0;
    return y;
}

inline PotentialRecord make_record(std::span<const Count> loads, Count tau, Count round) {
    PotentialRecord r;
    r.round = round;
    for (Count x : loads) {
        if (x > tau) {
            r.potential += x - tau;
            ++r.overfull_bins;
        }
        r.max_load = std::max(r.max_load, x);
        r.total_balls += x;
    }
    return r;
}

// ---------------------------------------------------------------------------

class BatchedChain {
public:
    BatchedChain(std::size_t n, double lambda) : loads_(n, 0), lambda_(lambda) {
        if (n < 1) throw std::invalid_argument("batched: n must be >= 1");
        if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("batched: lambda must be in (0, 1]");
    }

    std::size_t bins() const noexcept { return loads_.size(); }
    double lambda() const noexcept { return lambda_; }
    Count round() const noexcept { return round_; }
    std::span<const Count> loads() const noexcept { return loads_; }

    /// Every non-empty bin serves one ball, then Binomial(n, lambda) balls
    /// land uniformly at random. The record uses tau = 0.
    template <class Gen>
    PotentialRecord step(Gen& rng) {
        for (Count& x : loads_)
            if (x > 0) --x;
        const std::size_t n = loads_.size();
        Count arrivals = n;
        if (lambda_ < 1.0) arrivals = std::binomial_distribution<Count>{n, lambda_}(rng);
        for (Count i = 0; i < arrivals; ++i) ++loads_[uniform_below(rng, n)];
        ++round_;
        return make_record(loads_, 0, round_);
    }

private:
    std::vector<Count> loads_;
    double lambda_;
    Count round_ = 0;
};

// ---------------------------------------------------------------------------

enum class LoadMeasure { before_removal, after_removal };

/// Which colors throw in a round.
///  immediate:   the colors of the balls just removed are thrown again, topped
///               up to n throws with colors taken round-robin from the cursor.
///  round_robin: the next n colors from the cursor, regardless of removals.
enum class ThrowSchedule { immediate, round_robin };

struct RecycledConfig {
    std::size_t n = 64;
    Count tau = 17;
    std::size_t b = 10;
    Count recycle_every = 1;
    LoadMeasure measure = LoadMeasure::before_removal;
    ThrowSchedule schedule = ThrowSchedule::immediate;

    void validate() const {
        if (n < 1) throw std::invalid_argument("recycled: n must be >= 1");
        if (tau < 1) throw std::invalid_argument("recycled: tau must be >= 1");
        if (b < 1) throw std::invalid_argument("recycled: b must be >= 1");
        if (recycle_every < 1) throw std::invalid_argument("recycled: recycle_every must be >= 1");
    }
};

class RecycledChain {
public:
    static constexpr std::int32_t unassigned = -1;

    explicit RecycledChain(RecycledConfig config) : config_((config.validate(), config)) {
        const std::size_t colors = config_.b * config_.n;
        memory_.assign(colors, unassigned);
        occupancy_.assign(colors, 0);
        bins_.resize(config_.n);
        loads_.assign(config_.n, 0);
    }

    const RecycledConfig& config() const noexcept { return config_; }
    Count round() const noexcept { return round_; }
    std::size_t cursor() const noexcept { return cursor_; }
    std::span<const Count> loads() const noexcept { return loads_; }
    std::span<const std::int32_t> memory() const noexcept { return memory_; }
    const std::deque<std::uint32_t>& bin(std::size_t i) const { return bins_.at(i); }
    std::size_t colors() const noexcept { return memory_.size(); }

    PotentialRecord record() const { return make_record(loads_, config_.tau, round_); }

    template <class Gen>
    PotentialRecord step(Gen& rng) {
        ++round_;
        const bool update_memory = round_ % config_.recycle_every == 0;
        const std::size_t n = config_.n;
        removed_.clear();

        for (std::size_t i = 0; i < n; ++i) {
            auto& q = bins_[i];
            if (q.empty()) continue;
            const Count seen = config_.measure == LoadMeasure::before_removal ? q.size() : q.size() - 1;
            const std::uint32_t color = q.front();
            q.pop_front();
            --loads_[i];
            --occupancy_[color];
            if (update_memory) {
                if (seen <= config_.tau) {
                    if (memory_[color] == unassigned) memory_[color] = static_cast<std::int32_t>(i);
                } else {
                    memory_[color] = unassigned;
                }
            }
            removed_.push_back(color);
        }

        if (config_.schedule == ThrowSchedule::immediate) {
            for (std::uint32_t color : removed_) throw_ball(color, rng);
            for (std::size_t k = removed_.size(); k < n; ++k) throw_ball(next_color(), rng);
        } else {
            for (std::size_t k = 0; k < n; ++k) throw_ball(next_color(), rng);
        }
        return record();
    }

    /// Absorbing state: loads within threshold, no color with two balls,
    /// every color that is in play remembers its bin. Under the immediate
    /// schedule every bin must also be non-empty (no fresh random throws).
    /// Under round_robin every color must remember a bin.
    bool is_converged() const {
        for (std::size_t i = 0; i < config_.n; ++i) {
            if (loads_[i] > config_.tau) return false;
            if (config_.schedule == ThrowSchedule::immediate && loads_[i] == 0) return false;
        }
        for (std::size_t c = 0; c < memory_.size(); ++c) {
            if (occupancy_[c] > 1) return false;
            const bool in_play = config_.schedule == ThrowSchedule::round_robin || occupancy_[c] > 0;
            if (in_play && memory_[c] == unassigned) return false;
        }
        return true;
    }

    /// Empty string when internal bookkeeping is consistent.
    std::string check_invariants() const {
        std::vector<Count> occ(memory_.size(), 0);
        for (std::size_t i = 0; i < config_.n; ++i) {
            if (loads_[i] != bins_[i].size()) return "load mismatch";
            for (auto c : bins_[i]) ++occ[c];
        }
        for (std::size_t c = 0; c < occ.size(); ++c)
            if (occ[c] != occupancy_[c]) return "occupancy mismatch";
        if (cursor_ >= memory_.size()) return "cursor out of range";
        if (config_.schedule == ThrowSchedule::round_robin && cursor_ % config_.n != 0)
            return "cursor not aligned to batch";
        return {};
    }

private:
    std::uint32_t next_color() {
        const auto c = static_cast<std::uint32_t>(cursor_);
        cursor_ = (cursor_ + 1) % memory_.size();
        return c;
    }

    template <class Gen>
    void throw_ball(std::uint32_t color, Gen& rng) {
        const std::int32_t remembered = memory_[color];
        const std::size_t target = remembered != unassigned ? static_cast<std::size_t>(remembered)
                                                            : uniform_below(rng, config_.n);
        bins_[target].push_back(color);
        ++loads_[target];
        ++occupancy_[color];
    }

    RecycledConfig config_;
    std::vector<std::int32_t> memory_;
    std::vector<Count> occupancy_;
    std::vector<std::deque<std::uint32_t>> bins_;
    std::vector<Count> loads_;
    std::vector<std::uint32_t> removed_;
    std::size_t cursor_ = 0;
    Count round_ = 0;
};

}  // namespace arcane::models
