#pragma once

#include <cstdint>

#include "arcane/net/packet.hpp"
#include "arcane/util/rng.hpp"

namespace arcane::net {

/// Seeded ECMP hash over (src, dst, flow, ev). Each switch gets its own seed
/// so that hash decisions decorrelate across hops.
class EcmpHasher {
public:
    explicit EcmpHasher(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Per-flow part of the hash; finish with `select_keyed`.
    std::uint64_t flow_key(NodeId src, NodeId dst, FlowId flow) const noexcept {
        return combine(combine(seed_, (std::uint64_t{src} << 32) | dst), flow);
    }

    std::uint64_t hash(NodeId src, NodeId dst, FlowId flow, EntropyValue ev) const noexcept {
        return combine(flow_key(src, dst, flow), ev);
    }

    static std::uint32_t select_keyed(std::uint64_t key, EntropyValue ev, std::uint32_t num_ports) noexcept {
        if (num_ports <= 1) return 0;
        // Multiply-shift range reduction keeps the high-quality upper bits.
        const auto h = combine(key, ev);
        return static_cast<std::uint32_t>((static_cast<unsigned __int128>(h) * num_ports) >> 64);
    }

    std::uint32_t select(const PacketHeader& hdr, std::uint32_t num_ports) const noexcept {
        return select(hdr.src, hdr.dst, hdr.flow, hdr.ev, num_ports);
    }

    std::uint32_t select(NodeId src, NodeId dst, FlowId flow, EntropyValue ev, std::uint32_t num_ports) const noexcept {
        return select_keyed(flow_key(src, dst, flow), ev, num_ports);
    }

private:
    std::uint64_t seed_;
};

inline std::uint32_t ecmp_select(const EcmpHasher& hasher, const PacketHeader& hdr, std::uint32_t num_ports) {
    return hasher.select(hdr, num_ports);
}

}  // namespace arcane::net
