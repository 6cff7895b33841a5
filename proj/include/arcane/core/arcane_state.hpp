#pragma once

// Per-connection ARCANE state machine: EV caching on clean ACKs, oldest-first
// reuse, random exploration, and freezing mode on failure detection.

#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcane/util/rng.hpp"

namespace arcane {

using TimeNs = std::int64_t;
using EntropyValue = std::uint32_t;

struct BufferEntry {
    EntropyValue cached_ev = 0;
    bool is_valid = false;

    friend bool operator==(const BufferEntry&, const BufferEntry&) = default;
};

struct ArcaneConfig {
    std::size_t buffer_size = 8;
    std::uint32_t evs_size = 1u << 16;
    TimeNs freezing_timeout = 1'000'000;
    std::uint32_t bdp_packets = 0;
    /// When set, tick() applies the freezing exit check without an ACK.
    bool tick_exit = false;

    void validate() const {
        if (buffer_size < 1) throw std::invalid_argument("arcane: buffer_size must be >= 1");
        if (buffer_size > 256) throw std::invalid_argument("arcane: buffer_size must fit an 8-bit head");
        if (evs_size < 2) throw std::invalid_argument("arcane: evs_size must be >= 2");
        if (freezing_timeout < 0) throw std::invalid_argument("arcane: freezing_timeout must be >= 0");
    }
};

/// Bits of per-connection state: one (EV, valid) pair per buffer slot plus
/// head, valid count, exit timestamp, freezing flag and explore counter.
constexpr std::uint64_t memory_footprint_bits(std::size_t buffer_size) noexcept {
    constexpr std::uint64_t ev_bits = 16, valid_bits = 1;
    constexpr std::uint64_t head_bits = 8, num_valid_bits = 8, exit_time_bits = 32,
                            freezing_bits = 1, explore_bits = 8;
    return buffer_size * (ev_bits + valid_bits) + head_bits + num_valid_bits + exit_time_bits +
           freezing_bits + explore_bits;
}

inline std::uint64_t memory_footprint_bits(const ArcaneConfig& config) noexcept {
    return memory_footprint_bits(config.buffer_size);
}

class ArcaneState {
public:
    explicit ArcaneState(ArcaneConfig config)
        : config_(config), buffer_((config.validate(), config.buffer_size)), written_(config.buffer_size, false) {
        explore_counter_ = config_.bdp_packets;
    }

    const ArcaneConfig& config() const noexcept { return config_; }
    const std::vector<BufferEntry>& buffer() const noexcept { return buffer_; }
    std::size_t head() const noexcept { return head_; }
    std::size_t num_valid() const noexcept { return num_valid_; }
    bool is_freezing() const noexcept { return freezing_; }
    TimeNs exit_freezing_at() const noexcept { return exit_freezing_at_; }
    std::uint32_t explore_counter() const noexcept { return explore_counter_; }
    std::size_t ever_cached() const noexcept { return ever_cached_; }
    bool buffer_empty() const noexcept { return ever_cached_ == 0; }

    void on_ack(EntropyValue ack_ev, bool ecn_marked, TimeNs now) {
        if (ecn_marked) return;
        BufferEntry& slot = buffer_[head_];
        if (!slot.is_valid) ++num_valid_;
        slot.cached_ev = ack_ev % config_.evs_size;
        slot.is_valid = true;
        if (!written_[head_]) {
            written_[head_] = true;
            ++ever_cached_;
        }
        head_ = (head_ + 1) % buffer_.size();
        maybe_exit_freezing(now);
    }

    void on_failure_detection(TimeNs now) {
        if (!freezing_ && explore_counter_ == 0) {
            freezing_ = true;
            exit_freezing_at_ = now + config_.freezing_timeout;
        }
    }

    /// Optional exit check for hosts that may stop receiving ACKs while frozen.
    void tick(TimeNs now) {
        if (config_.tick_exit) maybe_exit_freezing(now);
    }

    bool can_reuse() const noexcept {
        return !buffer_empty() && (num_valid_ > 0 || freezing_);
    }

    /// Oldest valid entry if any, otherwise (frozen) the entry at head. While
    /// the buffer has never been filled, the frozen walk skips slots that
    /// were never written so only cached EVs are reused.
    EntropyValue get_next_ev() {
        if (!can_reuse()) throw std::logic_error("arcane: get_next_ev without reusable entries");
        const std::size_t size = buffer_.size();
        std::size_t offset;
        if (num_valid_ > 0) {
            offset = (head_ + size - num_valid_) % size;
            buffer_[offset].is_valid = false;
            --num_valid_;
        } else {
            while (!written_[head_]) head_ = (head_ + 1) % size;
            offset = head_;
            head_ = (head_ + 1) % size;
        }
        return buffer_[offset].cached_ev;
    }

    template <class Gen>
    EntropyValue on_send(Gen& rng) {
        if (must_explore()) {
            if (explore_counter_ > 0) --explore_counter_;
            return static_cast<EntropyValue>(uniform_below(rng, config_.evs_size));
        }
        return get_next_ev();
    }

    bool must_explore() const noexcept {
        return buffer_empty() || (num_valid_ == 0 && !freezing_) || explore_counter_ > 0;
    }

    /// Restarts exploration, e.g. after the host decides the connection was idle.
    void restart_exploration() noexcept { explore_counter_ = config_.bdp_packets; }

    /// All fields in declaration order, for golden traces and debugging.
    std::string snapshot() const {
        std::ostringstream os;
        os << "buffer=[";
        for (std::size_t i = 0; i < buffer_.size(); ++i) {
            if (i) os << ',';
            os << buffer_[i].cached_ev << (buffer_[i].is_valid ? 'v' : 'i');
        }
        os << "] head=" << head_ << " valid=" << num_valid_ << " frozen=" << freezing_
           << " exit=" << exit_freezing_at_ << " explore=" << explore_counter_
           << " cached=" << ever_cached_;
        return os.str();
    }

    /// Checks the structural invariants; returns an empty string when they hold.
    std::string check_invariants() const {
        std::size_t valid = 0;
        for (const auto& e : buffer_) {
            if (e.is_valid) ++valid;
            if (e.cached_ev >= config_.evs_size) return "cached EV outside EVS";
        }
        if (valid != num_valid_) return "valid count mismatch";
        if (num_valid_ > ever_cached_) return "more valid entries than ever cached";
        if (head_ >= buffer_.size()) return "head out of range";
        return {};
    }

private:
    void maybe_exit_freezing(TimeNs now) {
        if (freezing_ && now > exit_freezing_at_) {
            freezing_ = false;
            explore_counter_ = config_.bdp_packets;
        }
    }

    ArcaneConfig config_;
    std::vector<BufferEntry> buffer_;
    std::vector<bool> written_;  // bookkeeping only, not part of the footprint
    std::size_t head_ = 0;
    std::size_t num_valid_ = 0;
    bool freezing_ = false;
    TimeNs exit_freezing_at_ = 0;
    std::uint32_t explore_counter_ = 0;
    std::size_t ever_cached_ = 0;
};

}  // namespace arcane
