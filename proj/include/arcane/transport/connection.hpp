#pragma once

// Window-based sender with per-ACK additive increase, a fixed decrement per
// ECN-marked ACK, and RTO loss detection; receiver accepting out-of-order
// data with optional ACK coalescing.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "arcane/lb/load_balancer.hpp"
#include "arcane/net/packet.hpp"

namespace arcane::transport {

using net::FlowId;
using net::NodeId;
using net::Packet;
using net::PacketKind;

struct TransportConfig {
    std::uint32_t mtu_bytes = 4096;
    std::uint32_t ack_bytes = 64;
    TimeNs rto_ns = 70'000;
    std::uint32_t ack_coalesce = 1;
    double cwnd_init_bdp_fraction = 1.0;
    bool ack_loss = false;

    void validate() const {
        if (mtu_bytes < 64) throw std::invalid_argument("transport: mtu_bytes must be >= 64");
        if (ack_bytes < 1) throw std::invalid_argument("transport: ack_bytes must be >= 1");
        if (rto_ns <= 0) throw std::invalid_argument("transport: rto must be positive");
        if (ack_coalesce < 1) throw std::invalid_argument("transport: ack_coalesce must be >= 1");
        if (!(cwnd_init_bdp_fraction > 0.0)) throw std::invalid_argument("transport: cwnd_init_bdp_fraction must be > 0");
    }
};

struct FlowSpec {
    FlowId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::uint64_t bytes = 0;
    TimeNs start = 0;
};

class Connection {
public:
    struct Record {
        TimeNs sent_at = 0;
        EntropyValue ev = 0;
        std::uint32_t size = 0;
        std::uint32_t transmissions = 0;
        bool acked = false;
        bool in_flight = false;
        bool queued_retx = false;
    };

    Connection(FlowSpec flow, const TransportConfig& cfg, double cwnd_init_bytes, double cwnd_max_bytes)
        : flow_(flow), cfg_(cfg), cwnd_max_(std::max<double>(cwnd_max_bytes, cfg.mtu_bytes)) {
        cfg_.validate();
        if (flow_.bytes == 0) throw std::invalid_argument("connection: flow of zero bytes");
        const std::uint64_t pkts = (flow_.bytes + cfg_.mtu_bytes - 1) / cfg_.mtu_bytes;
        records_.resize(pkts);
        for (std::uint64_t s = 0; s < pkts; ++s) {
            const std::uint64_t remaining = flow_.bytes - s * cfg_.mtu_bytes;
            records_[s].size = static_cast<std::uint32_t>(std::min<std::uint64_t>(remaining, cfg_.mtu_bytes));
        }
        cwnd_ = std::clamp<double>(cwnd_init_bytes, cfg_.mtu_bytes, cwnd_max_);
    }

    const FlowSpec& flow() const noexcept { return flow_; }
    double cwnd() const noexcept { return cwnd_; }
    double cwnd_max() const noexcept { return cwnd_max_; }
    std::uint64_t flight_bytes() const noexcept { return flight_; }
    std::uint32_t next_seq() const noexcept { return next_seq_; }
    std::size_t total_packets() const noexcept { return records_.size(); }
    std::size_t acked_packets() const noexcept { return acked_; }
    bool complete() const noexcept { return acked_ == records_.size(); }
    const Record& record(std::uint32_t seq) const { return records_.at(seq); }
    std::uint64_t loss_events() const noexcept { return loss_events_; }
    std::uint64_t retransmissions() const noexcept { return retransmissions_; }

    void set_cwnd(double bytes) { cwnd_ = std::clamp<double>(bytes, cfg_.mtu_bytes, cwnd_max_); }

    bool has_data() const {
        return first_retx() != nullptr || next_seq_ < records_.size();
    }

    bool can_send() const { return has_data() && flight_ + cfg_.mtu_bytes <= cwnd_; }

    /// One packet if the window allows; EV from the bound load balancer.
    std::optional<Packet> next_packet(lb::LoadBalancer& lb, Rng& rng, TimeNs now) {
        if (!can_send()) return std::nullopt;
        std::uint32_t seq;
        if (const auto* s = first_retx()) {
            seq = *s;
            retx_.pop_front();
            ++retransmissions_;
        } else {
            seq = next_seq_++;
        }
        Record& r = records_[seq];
        r.queued_retx = false;
        r.in_flight = true;
        r.sent_at = now;
        r.ev = lb.pick_ev(rng, now);
        ++r.transmissions;
        flight_ += r.size;
        sent_order_.push_back({seq, now});

        Packet p;
        p.hdr.src = flow_.src;
        p.hdr.dst = flow_.dst;
        p.hdr.flow = flow_.id;
        p.hdr.ev = r.ev;
        p.hdr.seq = seq;
        p.hdr.size_bytes = r.size;
        p.hdr.kind = PacketKind::data;
        p.sent_at = now;
        return p;
    }

    std::vector<Packet> maybe_send(lb::LoadBalancer& lb, Rng& rng, TimeNs now) {
        std::vector<Packet> out;
        while (auto p = next_packet(lb, rng, now)) out.push_back(std::move(*p));
        return out;
    }

    /// Returns true if the ACK acknowledged at least one new packet.
    bool on_ack(lb::LoadBalancer& lb, const Packet& ack, TimeNs now) {
        if (ack.hdr.kind != PacketKind::ack) throw std::invalid_argument("on_ack: not an ACK");
        lb.notify_ack(ack.hdr.carried_ev, ack.hdr.ecn, now);
        bool fresh = false;
        auto mark = [&](std::uint32_t seq) {
            if (seq >= records_.size()) return;
            Record& r = records_[seq];
            if (r.acked) return;
            r.acked = true;
            ++acked_;
            fresh = true;
            if (r.in_flight) {
                r.in_flight = false;
                flight_ -= r.size;
            }
        };
        for (std::uint32_t s = cum_floor_; s < std::min<std::uint32_t>(ack.cumulative, records_.size()); ++s) mark(s);
        cum_floor_ = std::max(cum_floor_, std::min<std::uint32_t>(ack.cumulative, records_.size()));
        for (auto s : ack.covered) mark(s);
        if (!fresh) return false;
        const double mtu = cfg_.mtu_bytes;
        if (ack.hdr.ecn)
            set_cwnd(cwnd_ - mtu / 2.0);
        else
            set_cwnd(cwnd_ + mtu * mtu / cwnd_);
        return true;
    }

    /// Re-queues every in-flight packet older than the RTO. One window
    /// decrement and one failure notification per call that finds losses.
    std::vector<std::uint32_t> rto_check(lb::LoadBalancer& lb, TimeNs now) {
        std::vector<std::uint32_t> expired;
        while (!sent_order_.empty()) {
            const auto [seq, at] = sent_order_.front();
            Record& r = records_[seq];
            if (!r.in_flight || r.sent_at != at) {
                sent_order_.pop_front();
                continue;
            }
            if (now - at <= cfg_.rto_ns) break;
            sent_order_.pop_front();
            r.in_flight = false;
            r.queued_retx = true;
            flight_ -= r.size;
            retx_.push_back(seq);
            expired.push_back(seq);
        }
        if (!expired.empty()) {
            ++loss_events_;
            set_cwnd(cwnd_ - cfg_.mtu_bytes);
            lb.notify_failure(now);
        }
        return expired;
    }

    /// Time at which the oldest in-flight packet expires.
    std::optional<TimeNs> next_deadline() {
        while (!sent_order_.empty()) {
            const auto [seq, at] = sent_order_.front();
            const Record& r = records_[seq];
            if (r.in_flight && r.sent_at == at) return at + cfg_.rto_ns + 1;
            sent_order_.pop_front();
        }
        return std::nullopt;
    }

    /// Sum of in-flight record sizes; equals flight_bytes() when consistent.
    std::uint64_t recount_flight() const {
        std::uint64_t f = 0;
        for (const auto& r : records_)
            if (r.in_flight) f += r.size;
        return f;
    }

private:
    const std::uint32_t* first_retx() const {
        // Drop entries acked while waiting for retransmission.
        while (!retx_.empty() && records_[retx_.front()].acked) retx_.pop_front();
        return retx_.empty() ? nullptr : &retx_.front();
    }

    struct Sent {
        std::uint32_t seq;
        TimeNs at;
    };

    FlowSpec flow_;
    TransportConfig cfg_;
    double cwnd_ = 0;
    double cwnd_max_ = 0;
    std::uint64_t flight_ = 0;
    std::uint32_t next_seq_ = 0;
    std::uint32_t cum_floor_ = 0;
    std::size_t acked_ = 0;
    std::uint64_t loss_events_ = 0;
    std::uint64_t retransmissions_ = 0;
    std::vector<Record> records_;
    mutable std::deque<std::uint32_t> retx_;
    std::deque<Sent> sent_order_;
};

/// Receiver side of one flow.
class Receiver {
public:
    Receiver(FlowSpec flow, const TransportConfig& cfg)
        : flow_(flow), cfg_(cfg), received_((flow.bytes + cfg.mtu_bytes - 1) / cfg.mtu_bytes, false) {}

    bool complete() const noexcept { return unique_ == received_.size(); }
    std::size_t unique_packets() const noexcept { return unique_; }
    std::uint64_t delivered_bytes() const noexcept { return delivered_bytes_; }
    std::uint64_t duplicates() const noexcept { return duplicates_; }
    std::uint64_t acks_sent() const noexcept { return acks_sent_; }
    std::uint32_t cumulative() const noexcept { return cumulative_; }
    std::optional<TimeNs> completed_at() const noexcept { return completed_at_; }

    std::optional<Packet> on_data(const Packet& pkt, TimeNs now) {
        if (pkt.hdr.kind != PacketKind::data) throw std::invalid_argument("on_data: not a data packet");
        const std::uint32_t seq = pkt.hdr.seq;
        if (seq >= received_.size()) throw std::out_of_range("on_data: sequence beyond flow end");
        const bool was_complete = complete();
        if (received_[seq]) {
            ++duplicates_;
        } else {
            received_[seq] = true;
            ++unique_;
            delivered_bytes_ += pkt.hdr.size_bytes;
            while (cumulative_ < received_.size() && received_[cumulative_]) ++cumulative_;
        }
        pending_.push_back(seq);
        ++arrivals_;
        const bool just_completed = !was_complete && complete();
        if (just_completed) completed_at_ = now;
        if (arrivals_ % cfg_.ack_coalesce != 0 && !just_completed && !was_complete) return std::nullopt;

        Packet ack;
        ack.hdr.src = flow_.dst;
        ack.hdr.dst = flow_.src;
        ack.hdr.flow = flow_.id;
        ack.hdr.ev = pkt.hdr.ev;
        ack.hdr.carried_ev = pkt.hdr.ev;
        ack.hdr.seq = seq;
        ack.hdr.size_bytes = cfg_.ack_bytes;
        ack.hdr.kind = PacketKind::ack;
        ack.hdr.ecn = pkt.hdr.ecn;
        ack.sent_at = now;
        ack.cumulative = cumulative_;
        ack.covered = std::move(pending_);
        pending_.clear();
        ++acks_sent_;
        return ack;
    }

private:
    FlowSpec flow_;
    TransportConfig cfg_;
    std::vector<bool> received_;
    std::size_t unique_ = 0;
    std::uint32_t cumulative_ = 0;
    std::uint64_t arrivals_ = 0;
    std::uint64_t duplicates_ = 0;
    std::uint64_t delivered_bytes_ = 0;
    std::uint64_t acks_sent_ = 0;
    std::vector<std::uint32_t> pending_;
    std::optional<TimeNs> completed_at_;
};

}  // namespace arcane::transport
