#pragma once

// YAML experiment config. Every section is schema-checked: unknown keys are
// errors. Times are given in microseconds and stored as nanoseconds.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcane/models/balls_into_bins.hpp"
#include "arcane/sim/engine.hpp"

namespace arcane::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BallsBinsSection {
    std::string model = "recycled";
    std::size_t n = 64;
    double lambda = 1.0;
    std::uint64_t tau = 0;  // 0: ceil(4 ln n)
    std::uint64_t b = 0;    // 0: ceil(2.4 ln n)
    std::uint64_t rounds = 200;
    std::uint64_t recycle_every = 1;
    models::LoadMeasure measure = models::LoadMeasure::before_removal;
    models::ThrowSchedule schedule = models::ThrowSchedule::immediate;
};

struct EvsSection {
    std::uint32_t flows = 32;
    std::uint32_t uplinks = 32;
    std::vector<std::uint32_t> sizes{32, 256, 4096, 65536};
    std::size_t trials = 1000;
};

struct ExperimentConfig {
    sim::SimConfig sim;
    std::string trace_file;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    std::string run_name = "run";
    BallsBinsSection ballsbins;
    EvsSection evs;
    YAML::Node document;  // merged document, echoed into summaries
};

inline std::uint64_t default_tau(std::size_t n) {
    return static_cast<std::uint64_t>(std::ceil(4.0 * std::log(static_cast<double>(n))));
}
inline std::uint64_t default_b(std::size_t n) {
    return static_cast<std::uint64_t>(std::ceil(2.4 * std::log(static_cast<double>(n))));
}

inline TimeNs us_to_ns(double us) { return static_cast<TimeNs>(std::llround(us * 1000.0)); }

namespace detail {

/// Tracks which keys of a map were read; `finish` rejects the rest.
class Section {
public:
    Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_ + ": expected a mapping");
    }

    template <class T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        if (!node_ || node_.IsNull() || !node_[key]) return;
        try {
            out = node_[key].as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(where(key) + ": invalid value '" + YAML::Dump(node_[key]) + "'");
        }
    }

    template <class T>
    void get_positive(const std::string& key, T& out) {
        get(key, out);
        if (!(out > T{})) throw ConfigError(where(key) + ": must be positive");
    }

    void get_us(const std::string& key, TimeNs& out) {
        if (!has(key)) {
            seen_.insert(key);
            return;
        }
        double us = 0;
        get(key, us);
        if (!std::isfinite(us)) throw ConfigError(where(key) + ": must be finite");
        out = us_to_ns(us);
    }

    bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
    YAML::Node raw(const std::string& key) {
        seen_.insert(key);
        return node_ && node_.IsMap() ? node_[key] : YAML::Node{};
    }
    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const auto k = kv.first.as<std::string>();
            if (!seen_.count(k)) throw ConfigError("unknown key '" + where(k) + "'");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

inline std::vector<std::uint64_t> parse_seed_node(const YAML::Node& n) {
    std::vector<std::uint64_t> seeds;
    try {
        if (n.IsSequence())
            for (const auto& s : n) seeds.push_back(s.as<std::uint64_t>());
        else
            seeds.push_back(n.as<std::uint64_t>());
    } catch (const YAML::Exception&) {
        throw ConfigError("seeds: expected an integer or a list of integers");
    }
    return seeds;
}

}  // namespace detail

/// `key=value` with a dotted key; the value is parsed as YAML.
inline void apply_override(YAML::Node& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    YAML::Node value;
    try {
        value = YAML::Load(assignment.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw ConfigError("--set " + key + ": " + e.what());
    }
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto dot = key.find('.', start);
        parts.push_back(key.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    // yaml-cpp nodes are handles; walk with fresh copies to avoid rebinding.
    std::vector<YAML::Node> chain{root};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = chain.back()[parts[i]];
        if (next && !next.IsMap() && !next.IsNull())
            throw ConfigError("--set " + key + ": '" + parts[i] + "' is not a section");
        chain.push_back(next);
    }
    chain.back()[parts.back()] = value;
}

inline workload::FlowSizeCdf load_trace(const std::string& file, const std::filesystem::path& base) {
    std::filesystem::path p(file);
    if (p.is_relative() && !base.empty() && !std::filesystem::exists(p)) p = base / p;
    try {
        return workload::FlowSizeCdf::load(p.string());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("workload.trace_file: ") + e.what());
    }
}

/// Parse a merged document. `base_dir` resolves relative trace files.
inline ExperimentConfig parse(const YAML::Node& root, const std::filesystem::path& base_dir = {}) {
    using detail::Section;
    if (root && !root.IsNull() && !root.IsMap()) throw ConfigError("config root must be a mapping");
    ExperimentConfig cfg;
    cfg.document = YAML::Clone(root);
    Section top(root, "");
    auto& s = cfg.sim;

    {
        Section t(top.raw("topology"), "topology");
        auto& p = s.topology;
        t.get("tiers", p.tiers);
        t.get("nodes", p.nodes);
        t.get("hosts_per_t0", p.hosts_per_t0);
        t.get("uplinks_per_t0", p.uplinks_per_t0);
        if (t.has("oversubscription")) {
            double o = 0;
            t.get("oversubscription", o);
            p.oversubscription = o;
        } else {
            t.raw("oversubscription");
        }
        t.get("t0_per_pod", p.t0_per_pod);
        t.get("t1_uplinks", p.t1_uplinks);
        double gbps = p.link_bps / 1e9, host_gbps = 0;
        t.get_positive("link_gbps", gbps);
        t.get("host_link_gbps", host_gbps);
        if (host_gbps < 0) throw ConfigError("topology.host_link_gbps: must be >= 0");
        p.link_bps = gbps * 1e9;
        p.host_link_bps = host_gbps * 1e9;
        t.get("link_latency_ns", p.link_latency_ns);
        t.get("switch_latency_ns", p.switch_latency_ns);
        t.finish();
    }
    {
        Section w(top.raw("workload"), "workload");
        auto& wl = s.workload;
        std::string kind{workload::to_string(wl.kind)};
        w.get("kind", kind);
        try {
            wl.kind = workload::parse_kind(kind);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("workload.kind: ") + e.what());
        }
        w.get_positive("message_bytes", wl.message_bytes);
        w.get("incast_degree", wl.incast_degree);
        w.get("load", wl.load_fraction);
        w.get("trace_file", cfg.trace_file);
        w.get_us("horizon_us", wl.horizon);
        w.get_us("start_us", wl.start);
        w.finish();
        if (!cfg.trace_file.empty()) wl.trace_cdf = load_trace(cfg.trace_file, base_dir);
        if (wl.kind == workload::Kind::trace_driven && wl.trace_cdf.empty())
            throw ConfigError("workload.kind=trace needs workload.trace_file");
        if (wl.kind == workload::Kind::trace_driven && !(wl.load_fraction > 0 && wl.load_fraction <= 1))
            throw ConfigError("workload.load: must be in (0, 1]");
    }
    {
        Section t(top.raw("transport"), "transport");
        auto& tc = s.transport;
        t.get("mtu_bytes", tc.mtu_bytes);
        t.get("ack_bytes", tc.ack_bytes);
        t.get_us("rto_us", tc.rto_ns);
        t.get("ack_coalesce", tc.ack_coalesce);
        t.get("cwnd_init_bdp_fraction", tc.cwnd_init_bdp_fraction);
        t.get("ack_loss", tc.ack_loss);
        t.finish();
    }
    {
        std::string kind{lb::to_string(s.lb.kind)};
        top.get("lb", kind);
        try {
            s.lb.kind = lb::parse_kind(kind);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("lb: ") + e.what());
        }
        Section a(top.raw("arcane"), "arcane");
        auto& ac = s.lb.arcane;
        a.get("buffer_size", ac.buffer_size);
        a.get_us("freezing_timeout_us", ac.freezing_timeout);
        a.get("bdp_packets", ac.bdp_packets);
        a.get("evs_size", ac.evs_size);
        a.get("tick_exit", ac.tick_exit);
        a.finish();
    }
    {
        Section q(top.raw("queue"), "queue");
        q.get("capacity_bytes", s.queue_capacity_bytes);
        q.get("kmin_fraction", s.kmin_fraction);
        q.get("kmax_fraction", s.kmax_fraction);
        q.finish();
    }
    {
        const YAML::Node f = top.raw("failures");
        if (f && !f.IsNull()) {
            if (!f.IsSequence()) throw ConfigError("failures: expected a list");
            for (std::size_t i = 0; i < f.size(); ++i) {
                Section e(f[i], "failures[" + std::to_string(i) + "]");
                sim::FailureSpec spec;
                std::string mode = "down";
                double cap_gbps = 0;
                e.get("link", spec.link);
                e.get_us("start_us", spec.start);
                e.get_us("end_us", spec.end);
                e.get("mode", mode);
                e.get("capacity_gbps", cap_gbps);
                e.finish();
                if (spec.link.empty()) throw ConfigError(e.where("link") + ": required");
                if (mode == "down")
                    spec.mode = net::LinkMode::down;
                else if (mode == "degraded")
                    spec.mode = net::LinkMode::degraded;
                else
                    throw ConfigError(e.where("mode") + ": expected down|degraded");
                spec.capacity_bps = cap_gbps * 1e9;
                s.failures.push_back(spec);
            }
        }
    }
    {
        Section o(top.raw("output"), "output");
        o.get("dir", cfg.out_dir);
        o.get("run_name", cfg.run_name);
        double bucket_us = 20;
        o.get_positive("bucket_us", bucket_us);
        s.bucket_ns = us_to_ns(bucket_us);
        o.get("record_enqueues", s.record_enqueues);
        o.finish();
    }
    {
        Section m(top.raw("sim"), "sim");
        m.get_us("horizon_us", s.horizon_ns);
        m.get_positive("max_events", s.max_events);
        m.finish();
    }
    if (const auto seeds = top.raw("seeds"); seeds && !seeds.IsNull()) cfg.seeds = detail::parse_seed_node(seeds);
    {
        Section b(top.raw("ballsbins"), "ballsbins");
        auto& bb = cfg.ballsbins;
        b.get("model", bb.model);
        b.get_positive("n", bb.n);
        b.get("lambda", bb.lambda);
        b.get("tau", bb.tau);
        b.get("b", bb.b);
        b.get("rounds", bb.rounds);
        b.get_positive("recycle_every", bb.recycle_every);
        std::string measure = "before", schedule = "immediate";
        b.get("measure", measure);
        b.get("schedule", schedule);
        b.finish();
        if (measure == "before") bb.measure = models::LoadMeasure::before_removal;
        else if (measure == "after") bb.measure = models::LoadMeasure::after_removal;
        else throw ConfigError("ballsbins.measure: expected before|after");
        if (schedule == "immediate") bb.schedule = models::ThrowSchedule::immediate;
        else if (schedule == "round_robin") bb.schedule = models::ThrowSchedule::round_robin;
        else throw ConfigError("ballsbins.schedule: expected immediate|round_robin");
    }
    {
        Section e(top.raw("evs"), "evs");
        auto& ev = cfg.evs;
        e.get_positive("flows", ev.flows);
        e.get_positive("uplinks", ev.uplinks);
        e.get("sizes", ev.sizes);
        e.get_positive("trials", ev.trials);
        e.finish();
    }
    top.finish();
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline YAML::Node load_document(const std::string& path) {
    if (!std::filesystem::exists(path)) throw std::filesystem::filesystem_error(
        "config file not found", path, std::make_error_code(std::errc::no_such_file_or_directory));
    try {
        return YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Load, apply `--set` overrides in order, then parse.
inline ExperimentConfig load(const std::string& path, const std::vector<std::string>& overrides = {}) {
    YAML::Node root = path.empty() ? YAML::Node(YAML::NodeType::Map) : load_document(path);
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    for (const auto& o : overrides) apply_override(root, o);
    const auto base = path.empty() ? std::filesystem::path{} : std::filesystem::path(path).parent_path();
    return parse(root, base);
}

}  // namespace arcane::config
