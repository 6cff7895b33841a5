#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "arcane/sim/engine.hpp"
#include "arcane/util/stats.hpp"

namespace arcane::sim {

struct PairedRun {
    std::uint64_t seed;
    double completion_a, completion_b;  // ns
    std::uint64_t drops_a, drops_b;
};

struct Comparison {
    std::vector<PairedRun> pairs;
    stats::MeanCi completion_ratio;  // A / B per seed
    double drop_ratio = 0;           // sum A drops / sum B drops; infinite when B has none
    std::size_t b_faster = 0, ties = 0;
    double sign_test_p = 1.0;        // one-sided, H1: B completes faster
    bool all_complete = true;
};

/// Paired-seed comparison; both configs must describe the same workload.
inline Comparison summarize(std::vector<PairedRun> pairs) {
    Comparison c;
    std::vector<double> ratios;
    std::uint64_t da = 0, db = 0;
    for (const auto& p : pairs) {
        ratios.push_back(p.completion_a / p.completion_b);
        da += p.drops_a;
        db += p.drops_b;
        if (p.completion_b < p.completion_a)
            ++c.b_faster;
        else if (p.completion_b == p.completion_a)
            ++c.ties;
    }
    c.completion_ratio = stats::mean_ci(ratios);
    c.drop_ratio = db ? static_cast<double>(da) / static_cast<double>(db)
                      : (da ? std::numeric_limits<double>::infinity() : 1.0);
    c.sign_test_p = stats::sign_test_p(c.b_faster, pairs.size() - c.ties);
    c.pairs = std::move(pairs);
    return c;
}

inline void check_comparable(const SimConfig& a, const SimConfig& b) {
    const auto& ta = a.topology;
    const auto& tb = b.topology;
    if (ta.tiers != tb.tiers || ta.nodes != tb.nodes || ta.hosts_per_t0 != tb.hosts_per_t0 ||
        ta.uplinks_per_t0 != tb.uplinks_per_t0 || ta.link_bps != tb.link_bps)
        throw std::invalid_argument("compare: configs use different topologies");
    const auto& wa = a.workload;
    const auto& wb = b.workload;
    if (wa.kind != wb.kind || wa.message_bytes != wb.message_bytes || wa.incast_degree != wb.incast_degree ||
        wa.load_fraction != wb.load_fraction)
        throw std::invalid_argument("compare: configs use different workloads");
}

inline Comparison compare_runs(const SimConfig& a, const SimConfig& b, const std::vector<std::uint64_t>& seeds) {
    check_comparable(a, b);
    std::vector<PairedRun> pairs;
    bool complete = true;
    for (auto seed : seeds) {
        const auto ra = run(a, seed);
        const auto rb = run(b, seed);
        complete = complete && ra.all_complete && rb.all_complete;
        const auto ca = ra.completion_time(), cb = rb.completion_time();
        pairs.push_back(PairedRun{seed, static_cast<double>(ca ? *ca : ra.end_time),
                                  static_cast<double>(cb ? *cb : rb.end_time), ra.drops.total(), rb.drops.total()});
    }
    auto c = summarize(std::move(pairs));
    c.all_complete = complete;
    return c;
}

}  // namespace arcane::sim
