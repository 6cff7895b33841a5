#pragma once

// Two- and three-tier fat trees. Hosts are nodes [0, hosts); switches follow
// tier by tier. Port order per switch: down ports first, then up ports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcane/core/arcane_state.hpp"
#include "arcane/net/packet.hpp"

namespace arcane::net {

enum class Tier : std::uint8_t { host, t0, t1, t2 };

inline const char* tier_prefix(Tier t) {
    switch (t) {
        case Tier::host: return "h";
        case Tier::t0: return "t0_";
        case Tier::t1: return "t1_";
        case Tier::t2: return "t2_";
    }
    return "?";
}

enum class LinkMode : std::uint8_t { up, down, degraded };

struct LinkEvent {
    TimeNs start = 0;
    TimeNs end = 0;  // exclusive
    LinkMode mode = LinkMode::down;
    double capacity_bps = 0.0;  // degraded mode only
};

struct LinkStatus {
    bool up = true;
    double capacity_bps = 0.0;
};

using LinkId = std::uint32_t;
using PortIndex = std::uint32_t;

struct Link {
    NodeId a = 0, b = 0;          // a is the lower tier
    PortIndex a_port = 0, b_port = 0;
    double capacity_bps = 400e9;
    TimeNs latency_ns = 500;
    std::vector<LinkEvent> schedule;

    LinkStatus status_at(TimeNs now) const {
        for (const auto& e : schedule) {
            if (now >= e.start && now < e.end) {
                if (e.mode == LinkMode::down) return {false, 0.0};
                if (e.mode == LinkMode::degraded) return {true, e.capacity_bps};
            }
        }
        return {true, capacity_bps};
    }

    void validate_schedule() const {
        auto sorted = schedule;
        std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.start < y.start; });
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted[i].end <= sorted[i].start) throw std::invalid_argument("link schedule: empty interval");
            if (sorted[i].mode == LinkMode::degraded && !(sorted[i].capacity_bps > 0.0))
                throw std::invalid_argument("link schedule: degraded mode needs a positive capacity");
            if (i && sorted[i].start < sorted[i - 1].end)
                throw std::invalid_argument("link schedule: overlapping intervals");
        }
    }
};

struct Port {
    NodeId peer = 0;
    PortIndex peer_port = 0;
    LinkId link = 0;
};

struct Node {
    Tier tier = Tier::host;
    std::uint32_t index = 0;  // index within its tier
    std::vector<Port> ports;
    std::uint32_t down_ports = 0;

    std::uint32_t up_ports() const { return static_cast<std::uint32_t>(ports.size()) - down_ports; }
    std::string name() const { return tier_prefix(tier) + std::to_string(index); }
};

struct FatTreeParams {
    int tiers = 2;
    std::uint32_t nodes = 16;
    std::uint32_t hosts_per_t0 = 4;
    std::uint32_t uplinks_per_t0 = 4;
    /// Optional consistency check: hosts_per_t0 / uplinks_per_t0.
    std::optional<double> oversubscription;
    std::uint32_t t0_per_pod = 0;  // three tiers only
    std::uint32_t t1_uplinks = 0;  // three tiers only
    double link_bps = 400e9;
    double host_link_bps = 0.0;  // 0: same as link_bps
    TimeNs link_latency_ns = 500;
    TimeNs switch_latency_ns = 500;
};

class FabricTopology {
public:
    const FatTreeParams& params() const noexcept { return params_; }
    int tiers() const noexcept { return params_.tiers; }
    std::uint32_t hosts() const noexcept { return params_.nodes; }
    std::uint32_t t0_count() const noexcept { return t0_count_; }
    std::uint32_t t1_count() const noexcept { return t1_count_; }
    std::uint32_t t2_count() const noexcept { return t2_count_; }
    std::uint32_t pods() const noexcept { return pods_; }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const std::vector<Link>& links() const noexcept { return links_; }
    const Link& link(LinkId id) const { return links_.at(id); }
    Link& link(LinkId id) { return links_.at(id); }

    NodeId t0_id(std::uint32_t i) const { return first_t0_ + i; }
    NodeId t1_id(std::uint32_t i) const { return first_t1_ + i; }
    NodeId t2_id(std::uint32_t i) const { return first_t2_ + i; }
    std::uint32_t t0_of_host(NodeId host) const { return host / params_.hosts_per_t0; }
    std::uint32_t pod_of_t0(std::uint32_t t0) const { return params_.tiers == 3 ? t0 / params_.t0_per_pod : 0; }

    std::optional<LinkId> find_link(const std::string& name) const {
        const auto dash = name.find('-');
        if (dash == std::string::npos) return std::nullopt;
        const std::string x = name.substr(0, dash), y = name.substr(dash + 1);
        for (LinkId id = 0; id < links_.size(); ++id) {
            const auto an = nodes_[links_[id].a].name(), bn = nodes_[links_[id].b].name();
            if ((an == x && bn == y) || (an == y && bn == x)) return id;
        }
        return std::nullopt;
    }

    std::string link_name(LinkId id) const {
        return nodes_[links_[id].a].name() + "-" + nodes_[links_[id].b].name();
    }

    /// Deterministic downward port toward `dst`, or nullopt if `dst` is not
    /// below this switch (the packet must go up).
    std::optional<PortIndex> down_port(NodeId sw, NodeId dst) const {
        const Node& n = nodes_[sw];
        const std::uint32_t dst_t0 = t0_of_host(dst);
        switch (n.tier) {
            case Tier::host: return std::nullopt;
            case Tier::t0:
                if (dst_t0 != n.index) return std::nullopt;
                return dst % params_.hosts_per_t0;
            case Tier::t1:
                if (params_.tiers == 2) return dst_t0;
                if (pod_of_t0(dst_t0) != n.index / params_.uplinks_per_t0) return std::nullopt;
                return dst_t0 % params_.t0_per_pod;
            case Tier::t2: return pod_of_t0(dst_t0);
        }
        return std::nullopt;
    }

    /// Apply a schedule entry to a link after validating it.
    void add_link_event(LinkId id, LinkEvent ev) {
        links_.at(id).schedule.push_back(ev);
        links_.at(id).validate_schedule();
    }

    std::vector<LinkStatus> link_states_at(TimeNs now) const {
        std::vector<LinkStatus> out;
        out.reserve(links_.size());
        for (const auto& l : links_) out.push_back(l.status_at(now));
        return out;
    }

    /// Hop count (links) between two nodes with every link up.
    std::vector<std::uint32_t> hop_distances(NodeId from) const {
        std::vector<std::uint32_t> dist(nodes_.size(), UINT32_MAX);
        std::queue<NodeId> q;
        dist[from] = 0;
        q.push(from);
        while (!q.empty()) {
            const NodeId u = q.front();
            q.pop();
            for (const auto& p : nodes_[u].ports)
                if (dist[p.peer] == UINT32_MAX) {
                    dist[p.peer] = dist[u] + 1;
                    q.push(p.peer);
                }
        }
        return dist;
    }

    double host_link_bps() const { return params_.host_link_bps > 0 ? params_.host_link_bps : params_.link_bps; }

    static TimeNs serialization_ns(std::uint64_t bytes, double bps) {
        return static_cast<TimeNs>(std::ceil(static_cast<double>(bytes) * 8.0 * 1e9 / bps));
    }

    /// Unloaded round trip across the longest host-to-host path: data packet
    /// out, ACK back, store-and-forward at every hop.
    TimeNs base_rtt_ns(std::uint32_t mtu_bytes, std::uint32_t ack_bytes) const {
        const auto dist = hop_distances(0);
        std::uint32_t links = 0;
        for (NodeId h = 0; h < hosts(); ++h) links = std::max(links, dist[h]);
        if (links == 0) return 0;
        const std::uint32_t switches = links - 1;
        auto one_way = [&](std::uint32_t bytes) {
            // Two host links, the rest are fabric links.
            TimeNs t = 2 * serialization_ns(bytes, host_link_bps());
            t += static_cast<TimeNs>(links - 2) * serialization_ns(bytes, params_.link_bps);
            t += static_cast<TimeNs>(links) * params_.link_latency_ns;
            t += static_cast<TimeNs>(switches) * params_.switch_latency_ns;
            return t;
        };
        return one_way(mtu_bytes) + one_way(ack_bytes);
    }

    std::uint64_t bdp_bytes(std::uint32_t mtu_bytes, std::uint32_t ack_bytes) const {
        return static_cast<std::uint64_t>(host_link_bps() * static_cast<double>(base_rtt_ns(mtu_bytes, ack_bytes)) / 8e9);
    }

    /// Equal-cost paths between hosts on different T0s (different pods in three tiers).
    std::uint32_t path_count() const {
        return params_.tiers == 2 ? params_.uplinks_per_t0 : params_.uplinks_per_t0 * params_.t1_uplinks;
    }

private:
    friend FabricTopology build_fat_tree(const FatTreeParams&);

    NodeId add_node(Tier t, std::uint32_t index) {
        nodes_.push_back(Node{t, index, {}, 0});
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    void connect(NodeId lower, NodeId upper, double bps) {
        const auto id = static_cast<LinkId>(links_.size());
        Link l;
        l.a = lower;
        l.b = upper;
        l.capacity_bps = bps;
        l.latency_ns = params_.link_latency_ns;
        l.a_port = static_cast<PortIndex>(nodes_[lower].ports.size());
        l.b_port = static_cast<PortIndex>(nodes_[upper].ports.size());
        nodes_[lower].ports.push_back(Port{upper, l.b_port, id});
        nodes_[upper].ports.push_back(Port{lower, l.a_port, id});
        links_.push_back(l);
    }

    FatTreeParams params_;
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::uint32_t t0_count_ = 0, t1_count_ = 0, t2_count_ = 0, pods_ = 1;
    NodeId first_t0_ = 0, first_t1_ = 0, first_t2_ = 0;
};

inline FabricTopology build_fat_tree(const FatTreeParams& p) {
    auto fail = [](const std::string& why) { throw std::invalid_argument("fat tree: " + why); };
    if (p.tiers != 2 && p.tiers != 3) fail("tiers must be 2 or 3");
    if (p.nodes < 2) fail("need at least two nodes");
    if (p.hosts_per_t0 < 1 || p.nodes % p.hosts_per_t0 != 0) fail("nodes must be divisible by hosts_per_t0");
    if (p.uplinks_per_t0 < 1) fail("uplinks_per_t0 must be >= 1");
    if (!(p.link_bps > 0.0)) fail("link capacity must be positive");
    if (p.link_latency_ns < 0 || p.switch_latency_ns < 0) fail("latencies must be non-negative");
    if (p.oversubscription) {
        const double actual = static_cast<double>(p.hosts_per_t0) / p.uplinks_per_t0;
        if (std::abs(actual - *p.oversubscription) > 1e-9)
            fail("oversubscription " + std::to_string(*p.oversubscription) + " does not match hosts_per_t0/uplinks_per_t0 = " +
                 std::to_string(actual));
    }

    FabricTopology t;
    t.params_ = p;
    t.t0_count_ = p.nodes / p.hosts_per_t0;
    if (p.tiers == 2) {
        t.t1_count_ = p.uplinks_per_t0;
    } else {
        if (p.t0_per_pod < 1 || t.t0_count_ % p.t0_per_pod != 0) fail("T0 count must be divisible by t0_per_pod");
        if (p.t1_uplinks < 1) fail("t1_uplinks must be >= 1 for three tiers");
        t.pods_ = t.t0_count_ / p.t0_per_pod;
        t.t1_count_ = t.pods_ * p.uplinks_per_t0;
        t.t2_count_ = p.uplinks_per_t0 * p.t1_uplinks;
    }

    for (std::uint32_t h = 0; h < p.nodes; ++h) t.add_node(Tier::host, h);
    t.first_t0_ = static_cast<NodeId>(t.nodes_.size());
    for (std::uint32_t i = 0; i < t.t0_count_; ++i) t.add_node(Tier::t0, i);
    t.first_t1_ = static_cast<NodeId>(t.nodes_.size());
    for (std::uint32_t i = 0; i < t.t1_count_; ++i) t.add_node(Tier::t1, i);
    t.first_t2_ = static_cast<NodeId>(t.nodes_.size());
    for (std::uint32_t i = 0; i < t.t2_count_; ++i) t.add_node(Tier::t2, i);

    const double host_bps = t.host_link_bps();
    for (std::uint32_t h = 0; h < p.nodes; ++h) t.connect(h, t.t0_id(h / p.hosts_per_t0), host_bps);

    if (p.tiers == 2) {
        for (std::uint32_t i = 0; i < t.t0_count_; ++i)
            for (std::uint32_t j = 0; j < t.t1_count_; ++j) t.connect(t.t0_id(i), t.t1_id(j), p.link_bps);
    } else {
        // T0 i in pod q connects to the pod's T1s q*U .. q*U+U-1.
        for (std::uint32_t i = 0; i < t.t0_count_; ++i) {
            const std::uint32_t pod = i / p.t0_per_pod;
            for (std::uint32_t j = 0; j < p.uplinks_per_t0; ++j)
                t.connect(t.t0_id(i), t.t1_id(pod * p.uplinks_per_t0 + j), p.link_bps);
        }
        // T1 with in-pod index j connects to T2 group j.
        for (std::uint32_t k = 0; k < t.t1_count_; ++k) {
            const std::uint32_t j = k % p.uplinks_per_t0;
            for (std::uint32_t u = 0; u < p.t1_uplinks; ++u)
                t.connect(t.t1_id(k), t.t2_id(j * p.t1_uplinks + u), p.link_bps);
        }
    }

    // Down ports are added before up ports on every switch by construction.
    for (auto& n : t.nodes_) {
        switch (n.tier) {
            case Tier::host: n.down_ports = 0; break;
            case Tier::t0: n.down_ports = p.hosts_per_t0; break;
            case Tier::t1: n.down_ports = p.tiers == 2 ? t.t0_count_ : p.t0_per_pod; break;
            case Tier::t2: n.down_ports = static_cast<std::uint32_t>(n.ports.size()); break;
        }
    }
    return t;
}

inline std::vector<LinkStatus> apply_failure_schedule(const FabricTopology& topo, TimeNs now) {
    return topo.link_states_at(now);
}

}  // namespace arcane::net
