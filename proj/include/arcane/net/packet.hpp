#pragma once

#include <cstdint>
#include <vector>

#include "arcane/core/arcane_state.hpp"

namespace arcane::net {

using NodeId = std::uint32_t;
using FlowId = std::uint32_t;

enum class PacketKind : std::uint8_t { data, ack };

struct PacketHeader {
    NodeId src = 0;
    NodeId dst = 0;
    FlowId flow = 0;
    EntropyValue ev = 0;
    std::uint32_t seq = 0;
    std::uint32_t size_bytes = 4096;
    PacketKind kind = PacketKind::data;
    /// Data: congestion experienced. ACK: echo of the triggering packet's mark.
    bool ecn = false;
    /// ACK only: EV of the data packet that triggered it.
    EntropyValue carried_ev = 0;
};

struct Packet {
    PacketHeader hdr;
    std::uint64_t uid = 0;
    TimeNs sent_at = 0;
    /// ACK only: highest seq such that every seq below it was received.
    std::uint32_t cumulative = 0;
    /// ACK only: data seqs covered by this ACK (received since the previous ACK).
    std::vector<std::uint32_t> covered;
};

}  // namespace arcane::net
