#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>

#include "arcane/net/packet.hpp"
#include "arcane/util/rng.hpp"

namespace arcane::net {

/// Linear RED marking between kmin and kmax.
inline double red_mark_probability(std::uint64_t occupancy, std::uint64_t kmin, std::uint64_t kmax) {
    if (occupancy <= kmin) return 0.0;
    if (occupancy >= kmax) return 1.0;
    return static_cast<double>(occupancy - kmin) / static_cast<double>(kmax - kmin);
}

template <class Gen>
bool red_mark(std::uint64_t occupancy, std::uint64_t kmin, std::uint64_t kmax, Gen& rng) {
    if (kmin > kmax) throw std::invalid_argument("red_mark: kmin > kmax");
    const double p = red_mark_probability(occupancy, kmin, kmax);
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01(rng) < p;
}

struct EnqueueResult {
    bool accepted = false;
    bool dropped_tail = false;
    bool marked = false;
};

/// FIFO byte queue. Occupancy includes the packet currently being serialized.
class PortQueue {
public:
    PortQueue() = default;
    PortQueue(std::uint64_t capacity_bytes, double kmin_fraction = 0.2, double kmax_fraction = 0.8)
        : capacity_(capacity_bytes),
          kmin_(static_cast<std::uint64_t>(kmin_fraction * static_cast<double>(capacity_bytes))),
          kmax_(static_cast<std::uint64_t>(kmax_fraction * static_cast<double>(capacity_bytes))) {}

    std::uint64_t capacity_bytes() const noexcept { return capacity_; }
    std::uint64_t kmin_bytes() const noexcept { return kmin_; }
    std::uint64_t kmax_bytes() const noexcept { return kmax_; }
    std::uint64_t occupancy() const noexcept { return occupancy_; }
    std::size_t packets() const noexcept { return fifo_.size(); }
    bool empty() const noexcept { return fifo_.empty(); }
    std::uint64_t tail_drops() const noexcept { return tail_drops_; }

    /// Drop-tail on byte capacity; data packets get RED marking on arrival.
    /// Packets with `droppable == false` bypass the capacity check.
    template <class Gen>
    EnqueueResult enqueue(Packet pkt, Gen& rng, bool droppable = true) {
        EnqueueResult r;
        if (droppable && occupancy_ + pkt.hdr.size_bytes > capacity_) {
            ++tail_drops_;
            r.dropped_tail = true;
            return r;
        }
        if (pkt.hdr.kind == PacketKind::data && red_mark(occupancy_, kmin_, kmax_, rng)) {
            pkt.hdr.ecn = true;
            r.marked = true;
        }
        occupancy_ += pkt.hdr.size_bytes;
        fifo_.push_back(std::move(pkt));
        r.accepted = true;
        return r;
    }

    const Packet& front() const { return fifo_.front(); }

    Packet pop() {
        Packet p = std::move(fifo_.front());
        fifo_.pop_front();
        occupancy_ -= p.hdr.size_bytes;
        return p;
    }

private:
    std::deque<Packet> fifo_;
    std::uint64_t occupancy_ = 0;
    std::uint64_t capacity_ = 0;
    std::uint64_t kmin_ = 0;
    std::uint64_t kmax_ = 0;
    std::uint64_t tail_drops_ = 0;
};

template <class Gen>
EnqueueResult enqueue(PortQueue& queue, Packet pkt, Gen& rng) {
    return queue.enqueue(std::move(pkt), rng);
}

}  // namespace arcane::net
