#pragma once

// Discrete-event packet simulator. Integer nanosecond clock; events are
// ordered by (time, ordinal). Store-and-forward switches: one arrival event
// per hop, timed at end of serialization + link latency (+ switch latency
// when the receiver is a switch).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcane/lb/load_balancer.hpp"
#include "arcane/net/ecmp.hpp"
#include "arcane/net/port_queue.hpp"
#include "arcane/net/topology.hpp"
#include "arcane/transport/connection.hpp"
#include "arcane/util/rng.hpp"
#include "arcane/workload/workload.hpp"

namespace arcane::sim {

using net::NodeId;
using net::Packet;
using net::PacketKind;
using net::PortIndex;

struct FailureSpec {
    std::string link;  // "t0_0-t1_0"
    TimeNs start = 0;
    TimeNs end = 0;
    net::LinkMode mode = net::LinkMode::down;
    double capacity_bps = 0.0;
};

struct SimConfig {
    net::FatTreeParams topology;
    workload::WorkloadSpec workload;
    transport::TransportConfig transport;
    lb::BalancerSettings lb;
    std::vector<FailureSpec> failures;
    TimeNs bucket_ns = 20'000;
    TimeNs horizon_ns = 0;  // 0: run until every flow completes
    std::uint64_t max_events = 500'000'000;
    double kmin_fraction = 0.2;
    double kmax_fraction = 0.8;
    std::uint64_t queue_capacity_bytes = 0;  // 0: one BDP of the attached link
    /// Record every data-packet enqueue on switch ports (time, switch, port).
    bool record_enqueues = false;

    void validate() const {
        transport.validate();
        lb.arcane.validate();
        if (bucket_ns <= 0) throw std::invalid_argument("output.bucket_us must be positive");
        if (horizon_ns < 0) throw std::invalid_argument("sim.horizon_us must be >= 0");
        if (max_events == 0) throw std::invalid_argument("sim.max_events must be positive");
        if (!(kmin_fraction >= 0 && kmin_fraction <= kmax_fraction && kmax_fraction <= 1.0))
            throw std::invalid_argument("queue: need 0 <= kmin_fraction <= kmax_fraction <= 1");
        for (const auto& f : failures) {
            if (f.end <= f.start) throw std::invalid_argument("failure '" + f.link + "': end must be after start");
            if (f.mode == net::LinkMode::degraded && !(f.capacity_bps > 0))
                throw std::invalid_argument("failure '" + f.link + "': degraded mode needs capacity_gbps > 0");
        }
    }
};

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FlowResult {
    transport::FlowSpec spec;
    std::optional<TimeNs> fct;  // sender-side: last byte acknowledged
    std::uint64_t retransmissions = 0;
    std::uint64_t loss_events = 0;
};

struct PortBucket {
    std::uint64_t bits_tx = 0;
    std::uint64_t queue_bytes_max = 0;
    std::uint64_t queue_sample = 0;  // occupancy at the bucket start
    std::uint64_t data_enqueued = 0;
};

struct PortSeries {
    NodeId node = 0;
    PortIndex port = 0;
    std::string switch_name;
    bool uplink = false;
    double capacity_bps = 0;
    std::vector<PortBucket> buckets;
};

struct EnqueueRecord {
    TimeNs time;
    NodeId node;
    PortIndex port;
    transport::FlowId flow;
    bool link_down;
};

struct DropCounters {
    std::uint64_t tail = 0;
    std::uint64_t blackhole = 0;
    std::uint64_t total() const { return tail + blackhole; }
};

struct RunResult {
    std::uint64_t seed = 0;
    std::string run_id;
    std::vector<FlowResult> flows;
    std::vector<PortSeries> ports;  // switch egress ports only
    DropCounters drops;
    /// Data packets enqueued on a port whose link was down, per "switch:port".
    std::map<std::string, std::uint64_t> failed_port_packets;
    std::vector<EnqueueRecord> enqueues;  // when record_enqueues is set
    std::uint64_t injected = 0, delivered = 0, in_flight_end = 0;
    std::uint64_t data_injected = 0, acks_injected = 0;
    std::uint64_t events = 0;
    TimeNs end_time = 0;
    TimeNs base_rtt_ns = 0;
    std::uint64_t bdp_bytes = 0;
    std::uint64_t queue_capacity_bytes = 0;
    std::uint64_t kmin_bytes = 0;
    std::uint32_t bdp_packets = 0;
    bool all_complete = false;
    bool conserved = false;

    std::optional<TimeNs> completion_time() const {
        TimeNs t = 0;
        for (const auto& f : flows) {
            if (!f.fct) return std::nullopt;
            t = std::max(t, f.spec.start + *f.fct);
        }
        return t;
    }
};

/// Resolves derived parameters (BDP, queue size, ARCANE bdp_packets) on a copy.
struct Derived {
    TimeNs base_rtt = 0;
    std::uint64_t bdp = 0;
    std::uint32_t bdp_packets = 0;
};

inline Derived derive(const net::FabricTopology& topo, const transport::TransportConfig& tc) {
    Derived d;
    d.base_rtt = topo.base_rtt_ns(tc.mtu_bytes, tc.ack_bytes);
    d.bdp = topo.bdp_bytes(tc.mtu_bytes, tc.ack_bytes);
    d.bdp_packets = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, (d.bdp + tc.mtu_bytes - 1) / tc.mtu_bytes));
    return d;
}

class Simulator {
public:
    Simulator(SimConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed) {
        cfg_.validate();
        topo_ = net::build_fat_tree(cfg_.topology);
        for (const auto& f : cfg_.failures) {
            const auto id = topo_.find_link(f.link);
            if (!id) throw std::invalid_argument("failure: unknown link '" + f.link + "'");
            topo_.add_link_event(*id, net::LinkEvent{f.start, f.end, f.mode, f.capacity_bps});
        }
        derived_ = derive(topo_, cfg_.transport);
        if (cfg_.lb.arcane.bdp_packets == 0) cfg_.lb.arcane.bdp_packets = derived_.bdp_packets;
        setup();
    }

    const net::FabricTopology& topology() const noexcept { return topo_; }
    const Derived& derived() const noexcept { return derived_; }
    const SimConfig& config() const noexcept { return cfg_; }

    RunResult run() {
        if (ran_) throw std::logic_error("Simulator::run called twice");
        ran_ = true;
        schedule_initial();
        while (!events_.empty() && completed_ < conns_.size()) {
            const Event ev = events_.top();
            if (cfg_.horizon_ns > 0 && ev.time > cfg_.horizon_ns) break;
            events_.pop();
            now_ = ev.time;
            if (++processed_ > cfg_.max_events) {
                std::ostringstream os;
                os << "livelock guard: exceeded " << cfg_.max_events << " events at t=" << now_ << " ns ("
                   << completed_ << "/" << conns_.size() << " flows complete, " << in_transit() << " packets in transit)";
                throw SimError(os.str());
            }
            dispatch(ev);
        }
        return finish();
    }

private:
    enum class EvKind : std::uint8_t { arrival, tx_done, timer, flow_start, schedule_change, sample };

    struct Event {
        TimeNs time;
        std::uint64_t ordinal;
        EvKind kind;
        std::uint32_t a;  // node or flow
        std::uint32_t b;  // port or packet slot
        bool operator>(const Event& o) const { return time != o.time ? time > o.time : ordinal > o.ordinal; }
    };

    struct HostNic {
        std::deque<Packet> acks;
        std::vector<std::uint32_t> active;  // flows that may still send
        std::size_t rr = 0;
        std::optional<Packet> in_service;
    };

    struct PortState {
        net::PortQueue queue;
        bool busy = false;
        std::int32_t series = -1;
    };

    void setup() {
        const auto& nodes = topo_.nodes();
        ports_.resize(nodes.size());
        hashers_.reserve(nodes.size());
        red_rng_.reserve(nodes.size());
        for (NodeId n = 0; n < nodes.size(); ++n) {
            hashers_.emplace_back(combine(combine(seed_, hash_label("ecmp")), n));
            red_rng_.push_back(derive_rng(seed_, "red", n));
            const auto& node = nodes[n];
            for (PortIndex p = 0; p < node.ports.size(); ++p) {
                const auto& link = topo_.link(node.ports[p].link);
                const std::uint64_t cap =
                    cfg_.queue_capacity_bytes
                        ? cfg_.queue_capacity_bytes
                        : static_cast<std::uint64_t>(link.capacity_bps * static_cast<double>(derived_.base_rtt) / 8e9);
                PortState ps;
                ps.queue = net::PortQueue(std::max<std::uint64_t>(cap, cfg_.transport.mtu_bytes), cfg_.kmin_fraction,
                                          cfg_.kmax_fraction);
                if (node.tier != net::Tier::host) {
                    ps.series = static_cast<std::int32_t>(series_.size());
                    PortSeries s;
                    s.node = n;
                    s.port = p;
                    s.switch_name = node.name();
                    s.uplink = p >= node.down_ports;
                    s.capacity_bps = link.capacity_bps;
                    series_.push_back(std::move(s));
                }
                ports_[n].push_back(std::move(ps));
            }
        }
        nics_.resize(topo_.hosts());

        auto wl_rng = derive_rng(seed_, "workload");
        flows_ = workload::generate(cfg_.workload, topo_.hosts(), topo_.host_link_bps(), wl_rng);
        if (flows_.empty()) throw std::invalid_argument("workload produced no flows");
        const double cwnd_init = cfg_.transport.cwnd_init_bdp_fraction * static_cast<double>(derived_.bdp);
        const double cwnd_max = static_cast<double>(fabric_queue_capacity()) * topo_.path_count();
        conns_.reserve(flows_.size());
        receivers_.reserve(flows_.size());
        for (const auto& f : flows_) {
            if (f.src >= topo_.hosts() || f.dst >= topo_.hosts() || f.src == f.dst)
                throw std::invalid_argument("workload: invalid flow endpoints");
            conns_.emplace_back(f, cfg_.transport, cwnd_init, cwnd_max);
            receivers_.emplace_back(f, cfg_.transport);
            lbs_.push_back(lb::make_balancer(cfg_.lb, seed_, f.id));
            lb_rng_.push_back(derive_rng(seed_, "lb", f.id));
            timer_at_.push_back(-1);
        }
        results_.resize(flows_.size());
        for (std::size_t i = 0; i < flows_.size(); ++i) results_[i].spec = flows_[i];
    }

    std::uint64_t fabric_queue_capacity() const {
        // Queue of the first T0 uplink (or the first switch port when T0s have none).
        const NodeId t0 = topo_.t0_id(0);
        return ports_[t0].back().queue.capacity_bytes();
    }

    void schedule(TimeNs t, EvKind k, std::uint32_t a, std::uint32_t b) {
        if (t < now_) {
            std::ostringstream os;
            os << "causality violation: event at " << t << " ns scheduled at " << now_ << " ns";
            throw std::logic_error(os.str());
        }
        events_.push(Event{t, ordinal_++, k, a, b});
    }

    void schedule_initial() {
        for (const auto& f : flows_) schedule(f.start, EvKind::flow_start, f.id, 0);
        for (const auto& link : topo_.links())
            for (const auto& e : link.schedule) {
                schedule(e.start, EvKind::schedule_change, 0, 0);
                schedule(e.end, EvKind::schedule_change, 0, 0);
            }
        schedule(0, EvKind::sample, 0, 0);
    }

    // In-transit packets (on a wire, between hops) live in a slab.
    std::uint32_t put(Packet p) {
        if (!free_.empty()) {
            const auto s = free_.back();
            free_.pop_back();
            slab_[s] = std::move(p);
            return s;
        }
        slab_.push_back(std::move(p));
        return static_cast<std::uint32_t>(slab_.size() - 1);
    }
    Packet take(std::uint32_t slot) {
        Packet p = std::move(slab_[slot]);
        free_.push_back(slot);
        return p;
    }
    std::uint64_t in_transit() const { return slab_.size() - free_.size(); }

    Packet inject(Packet p) {
        p.uid = injected_++;
        (p.hdr.kind == PacketKind::data ? data_injected_ : acks_injected_)++;
        return p;
    }

    PortBucket& bucket(std::int32_t series, TimeNs t) {
        auto& v = series_[static_cast<std::size_t>(series)].buckets;
        const auto i = static_cast<std::size_t>(t / cfg_.bucket_ns);
        if (v.size() <= i) v.resize(i + 1);
        return v[i];
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EvKind::arrival: on_arrival(ev.a, ev.b); break;
            case EvKind::tx_done: on_tx_done(ev.a, ev.b); break;
            case EvKind::timer: on_timer(ev.a); break;
            case EvKind::flow_start: on_flow_start(ev.a); break;
            case EvKind::schedule_change:
                // Ports idled by a dead link may transmit again.
                for (NodeId n = 0; n < ports_.size(); ++n) {
                    if (topo_.node(n).tier == net::Tier::host)
                        kick_host(n);
                    else
                        for (PortIndex p = 0; p < ports_[n].size(); ++p) start_tx(n, p);
                }
                break;
            case EvKind::sample: on_sample(); break;
        }
    }

    void on_sample() {
        for (std::size_t s = 0; s < series_.size(); ++s) {
            const auto& ser = series_[s];
            bucket(static_cast<std::int32_t>(s), now_).queue_sample = ports_[ser.node][ser.port].queue.occupancy();
        }
        schedule(now_ + cfg_.bucket_ns, EvKind::sample, 0, 0);
    }

    void on_flow_start(std::uint32_t flow) {
        nics_[flows_[flow].src].active.push_back(flow);
        kick_host(flows_[flow].src);
    }

    void on_timer(std::uint32_t flow) {
        if (timer_at_[flow] != now_) return;  // superseded
        timer_at_[flow] = -1;
        auto& c = conns_[flow];
        if (c.complete()) return;
        const auto expired = c.rto_check(*lbs_[flow], now_);
        arm_timer(flow);
        if (!expired.empty()) kick_host(flows_[flow].src);
    }

    void arm_timer(std::uint32_t flow) {
        auto& c = conns_[flow];
        if (c.complete()) return;
        const auto d = c.next_deadline();
        if (!d) return;
        if (timer_at_[flow] >= 0 && timer_at_[flow] <= *d) return;
        timer_at_[flow] = *d;
        schedule(*d, EvKind::timer, flow, 0);
    }

    std::optional<Packet> pull_data(HostNic& nic) {
        std::size_t tries = 0;
        while (!nic.active.empty() && tries < nic.active.size()) {
            if (nic.rr >= nic.active.size()) nic.rr = 0;
            const auto flow = nic.active[nic.rr];
            auto& c = conns_[flow];
            if (c.complete()) {
                nic.active.erase(nic.active.begin() + static_cast<std::ptrdiff_t>(nic.rr));
                continue;
            }
            ++nic.rr;
            ++tries;
            lbs_[flow]->tick(now_);
            if (auto p = c.next_packet(*lbs_[flow], lb_rng_[flow], now_)) {
                arm_timer(flow);
                return p;
            }
        }
        return std::nullopt;
    }

    /// The NIC pulls a packet only when idle: ACKs first, then data from
    /// active connections round-robin, each gated by its window.
    void kick_host(NodeId h) {
        auto& nic = nics_[h];
        while (!nic.in_service) {
            std::optional<Packet> pkt;
            if (!nic.acks.empty()) {
                pkt = std::move(nic.acks.front());
                nic.acks.pop_front();
            } else if (auto d = pull_data(nic)) {
                pkt = inject(std::move(*d));
            } else {
                return;
            }
            const auto status = topo_.link(topo_.node(h).ports[0].link).status_at(now_);
            if (!status.up) {
                ++drops_.blackhole;
                continue;
            }
            const auto ser = net::FabricTopology::serialization_ns(pkt->hdr.size_bytes, status.capacity_bps);
            nic.in_service = std::move(pkt);
            schedule(now_ + ser, EvKind::tx_done, h, 0);
        }
    }

    void send_to_peer(NodeId n, PortIndex p, Packet pkt) {
        const auto& port = topo_.node(n).ports[p];
        TimeNs delay = topo_.link(port.link).latency_ns;
        if (topo_.node(port.peer).tier != net::Tier::host) delay += cfg_.topology.switch_latency_ns;
        schedule(now_ + delay, EvKind::arrival, port.peer, put(std::move(pkt)));
    }

    void on_tx_done(NodeId n, PortIndex p) {
        if (topo_.node(n).tier == net::Tier::host) {
            auto& nic = nics_[n];
            Packet pkt = std::move(*nic.in_service);
            nic.in_service.reset();
            send_to_peer(n, 0, std::move(pkt));
            kick_host(n);
            return;
        }
        auto& ps = ports_[n][p];
        ps.busy = false;
        send_to_peer(n, p, ps.queue.pop());
        start_tx(n, p);
    }

    void start_tx(NodeId n, PortIndex p) {
        auto& ps = ports_[n][p];
        if (ps.busy) return;
        const auto& port = topo_.node(n).ports[p];
        while (!ps.queue.empty()) {
            const auto status = topo_.link(port.link).status_at(now_);
            if (!status.up) {
                // A dead link drains the port silently.
                ++drops_.blackhole;
                ps.queue.pop();
                continue;
            }
            const auto& front = ps.queue.front();
            if (ps.series >= 0) bucket(ps.series, now_).bits_tx += std::uint64_t{front.hdr.size_bytes} * 8;
            ps.busy = true;
            schedule(now_ + net::FabricTopology::serialization_ns(front.hdr.size_bytes, status.capacity_bps),
                     EvKind::tx_done, n, p);
            return;
        }
    }

    void on_arrival(NodeId n, std::uint32_t slot) {
        Packet pkt = take(slot);
        const auto& node = topo_.node(n);
        if (node.tier == net::Tier::host) {
            deliver(n, std::move(pkt));
            return;
        }
        PortIndex out;
        if (const auto d = topo_.down_port(n, pkt.hdr.dst))
            out = *d;
        else
            out = node.down_ports + hashers_[n].select(pkt.hdr, node.up_ports());
        enqueue(n, out, std::move(pkt));
    }

    void enqueue(NodeId n, PortIndex p, Packet pkt) {
        auto& ps = ports_[n][p];
        const bool data = pkt.hdr.kind == PacketKind::data;
        if (data && ps.series >= 0) {
            const bool down = !topo_.link(topo_.node(n).ports[p].link).status_at(now_).up;
            ++bucket(ps.series, now_).data_enqueued;
            if (down) ++failed_port_packets_[series_[static_cast<std::size_t>(ps.series)].switch_name + ":" + std::to_string(p)];
            if (cfg_.record_enqueues) enqueues_.push_back(EnqueueRecord{now_, n, p, pkt.hdr.flow, down});
        }
        const auto r = ps.queue.enqueue(std::move(pkt), red_rng_[n], data || cfg_.transport.ack_loss);
        if (r.dropped_tail) {
            ++drops_.tail;
            return;
        }
        if (ps.series >= 0) {
            auto& b = bucket(ps.series, now_);
            b.queue_bytes_max = std::max(b.queue_bytes_max, ps.queue.occupancy());
        }
        start_tx(n, p);
    }

    void deliver(NodeId h, Packet pkt) {
        ++delivered_;
        if (pkt.hdr.dst != h) throw std::logic_error("packet delivered to the wrong host");
        const auto flow = pkt.hdr.flow;
        if (pkt.hdr.kind == PacketKind::data) {
            if (auto ack = receivers_[flow].on_data(pkt, now_)) {
                nics_[h].acks.push_back(inject(std::move(*ack)));
                kick_host(h);
            }
            return;
        }
        auto& c = conns_[flow];
        const bool was_complete = c.complete();
        c.on_ack(*lbs_[flow], pkt, now_);
        if (!was_complete && c.complete()) {
            results_[flow].fct = now_ - flows_[flow].start;
            ++completed_;
        }
        kick_host(h);
    }

    RunResult finish() {
        RunResult r;
        r.seed = seed_;
        r.end_time = now_;
        r.events = processed_;
        r.base_rtt_ns = derived_.base_rtt;
        r.bdp_bytes = derived_.bdp;
        r.bdp_packets = cfg_.lb.arcane.bdp_packets;
        r.queue_capacity_bytes = fabric_queue_capacity();
        r.kmin_bytes = ports_[topo_.t0_id(0)].back().queue.kmin_bytes();
        r.drops = drops_;
        r.failed_port_packets = failed_port_packets_;
        r.enqueues = std::move(enqueues_);
        r.injected = injected_;
        r.data_injected = data_injected_;
        r.acks_injected = acks_injected_;
        r.delivered = delivered_;

        std::uint64_t held = in_transit();
        for (const auto& node_ports : ports_)
            for (const auto& ps : node_ports) held += ps.queue.packets();
        for (const auto& nic : nics_) held += nic.acks.size() + (nic.in_service ? 1 : 0);
        r.in_flight_end = held;
        r.conserved = injected_ == delivered_ + drops_.total() + held;
        for (std::size_t i = 0; i < conns_.size(); ++i) {
            if (conns_[i].recount_flight() != conns_[i].flight_bytes()) r.conserved = false;
            results_[i].retransmissions = conns_[i].retransmissions();
            results_[i].loss_events = conns_[i].loss_events();
        }
        r.all_complete = completed_ == conns_.size();
        r.flows = results_;

        const std::size_t nb = static_cast<std::size_t>(now_ / cfg_.bucket_ns) + 1;
        for (auto& s : series_) s.buckets.resize(nb);
        r.ports = series_;
        return r;
    }

    SimConfig cfg_;
    std::uint64_t seed_;
    net::FabricTopology topo_;
    Derived derived_;
    bool ran_ = false;

    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
    std::uint64_t ordinal_ = 0;
    std::uint64_t processed_ = 0;
    TimeNs now_ = 0;

    std::vector<Packet> slab_;
    std::vector<std::uint32_t> free_;
    std::uint64_t injected_ = 0, delivered_ = 0;
    std::uint64_t data_injected_ = 0, acks_injected_ = 0;

    std::vector<std::vector<PortState>> ports_;
    std::vector<net::EcmpHasher> hashers_;
    std::vector<Rng> red_rng_;
    std::vector<PortSeries> series_;
    std::vector<HostNic> nics_;

    std::vector<transport::FlowSpec> flows_;
    std::vector<transport::Connection> conns_;
    std::vector<transport::Receiver> receivers_;
    std::vector<std::unique_ptr<lb::LoadBalancer>> lbs_;
    std::vector<Rng> lb_rng_;
    std::vector<TimeNs> timer_at_;
    std::vector<FlowResult> results_;
    std::size_t completed_ = 0;

    DropCounters drops_;
    std::map<std::string, std::uint64_t> failed_port_packets_;
    std::vector<EnqueueRecord> enqueues_;
};

inline RunResult run(const SimConfig& cfg, std::uint64_t seed) {
    Simulator sim(cfg, seed);
    return sim.run();
}

}  // namespace arcane::sim
