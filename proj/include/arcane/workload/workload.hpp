#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arcane/transport/connection.hpp"
#include "arcane/util/rng.hpp"

namespace arcane::workload {

using transport::FlowSpec;

enum class Kind { incast, permutation, tornado, trace_driven };

inline Kind parse_kind(std::string_view s) {
    if (s == "incast") return Kind::incast;
    if (s == "permutation") return Kind::permutation;
    if (s == "tornado") return Kind::tornado;
    if (s == "trace" || s == "trace_driven") return Kind::trace_driven;
    throw std::invalid_argument("unknown workload kind '" + std::string(s) + "'");
}

inline std::string_view to_string(Kind k) {
    switch (k) {
        case Kind::incast: return "incast";
        case Kind::permutation: return "permutation";
        case Kind::tornado: return "tornado";
        case Kind::trace_driven: return "trace";
    }
    return "?";
}

/// Piecewise-linear flow-size CDF.
class FlowSizeCdf {
public:
    using Point = std::pair<double, double>;  // (size_bytes, cumulative probability)

    FlowSizeCdf() = default;
    explicit FlowSizeCdf(std::vector<Point> points) : points_(std::move(points)) { validate(); }

    const std::vector<Point>& points() const noexcept { return points_; }
    bool empty() const noexcept { return points_.empty(); }

    void validate() const {
        if (points_.empty()) throw std::invalid_argument("cdf: no points");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const auto [size, prob] = points_[i];
            if (!(size > 0.0)) throw std::invalid_argument("cdf: sizes must be positive");
            if (!(prob > 0.0 && prob <= 1.0)) throw std::invalid_argument("cdf: probabilities must be in (0, 1]");
            if (i && !(size > points_[i - 1].first && prob > points_[i - 1].second))
                throw std::invalid_argument("cdf: points must be strictly increasing in size and probability");
        }
        if (std::abs(points_.back().second - 1.0) > 1e-9) throw std::invalid_argument("cdf: must end at probability 1.0");
    }

    /// Inverse CDF with linear interpolation; mass below the first point sits on it.
    double quantile(double u) const {
        if (u <= points_.front().second) return points_.front().first;
        for (std::size_t i = 1; i < points_.size(); ++i) {
            const auto [s1, p1] = points_[i];
            if (u <= p1) {
                const auto [s0, p0] = points_[i - 1];
                return s0 + (s1 - s0) * (u - p0) / (p1 - p0);
            }
        }
        return points_.back().first;
    }

    double mean() const {
        double m = points_.front().first * points_.front().second;
        for (std::size_t i = 1; i < points_.size(); ++i)
            m += (points_[i].second - points_[i - 1].second) * 0.5 * (points_[i].first + points_[i - 1].first);
        return m;
    }

    template <class Gen>
    std::uint64_t sample(Gen& rng) const {
        const double u = 1.0 - uniform01(rng);  // (0, 1]
        return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(quantile(u))));
    }

    /// Two columns `size_bytes cum_prob`, `#` starts a comment.
    static FlowSizeCdf parse(std::istream& in) {
        std::vector<Point> pts;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            double size, prob;
            if (!(ls >> size)) continue;
            if (!(ls >> prob)) throw std::invalid_argument("cdf: line " + std::to_string(lineno) + ": expected two columns");
            std::string extra;
            if (ls >> extra) throw std::invalid_argument("cdf: line " + std::to_string(lineno) + ": trailing data");
            pts.emplace_back(size, prob);
        }
        return FlowSizeCdf{std::move(pts)};
    }

    static FlowSizeCdf load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cdf: cannot open " + path);
        return parse(f);
    }

private:
    std::vector<Point> points_;
};

struct WorkloadSpec {
    Kind kind = Kind::permutation;
    std::uint64_t message_bytes = 1 << 20;
    std::uint32_t incast_degree = 8;
    double load_fraction = 0.5;
    FlowSizeCdf trace_cdf;
    TimeNs start = 0;
    TimeNs horizon = 5'000'000;
};

inline std::vector<std::uint32_t> tornado_pairs(std::uint32_t nodes) {
    std::vector<std::uint32_t> dst(nodes);
    for (std::uint32_t i = 0; i < nodes; ++i) dst[i] = (i + nodes / 2) % nodes;
    return dst;
}

/// Uniform random permutation without fixed points (rejection sampling).
template <class Gen>
std::vector<std::uint32_t> random_derangement(std::uint32_t nodes, Gen& rng) {
    std::vector<std::uint32_t> p(nodes);
    std::iota(p.begin(), p.end(), 0u);
    if (nodes < 2) return p;
    for (;;) {
        std::shuffle(p.begin(), p.end(), rng);
        bool fixed = false;
        for (std::uint32_t i = 0; i < nodes && !fixed; ++i) fixed = p[i] == i;
        if (!fixed) return p;
    }
}

/// `host_bps` is the access link rate used to size trace-driven arrivals.
template <class Gen>
std::vector<FlowSpec> generate(const WorkloadSpec& spec, std::uint32_t nodes, double host_bps, Gen& rng) {
    if (nodes < 2) throw std::invalid_argument("workload: need at least two nodes");
    std::vector<FlowSpec> flows;
    auto add = [&](std::uint32_t src, std::uint32_t dst, std::uint64_t bytes, TimeNs start) {
        flows.push_back(FlowSpec{static_cast<transport::FlowId>(flows.size()), src, dst, bytes, start});
    };
    switch (spec.kind) {
        case Kind::incast: {
            if (spec.incast_degree < 1 || spec.incast_degree >= nodes)
                throw std::invalid_argument("workload: incast degree must be in [1, nodes)");
            std::vector<std::uint32_t> hosts(nodes);
            std::iota(hosts.begin(), hosts.end(), 0u);
            std::shuffle(hosts.begin(), hosts.end(), rng);
            const std::uint32_t receiver = hosts[0];
            for (std::uint32_t i = 1; i <= spec.incast_degree; ++i) add(hosts[i], receiver, spec.message_bytes, spec.start);
            break;
        }
        case Kind::permutation: {
            const auto dst = random_derangement(nodes, rng);
            for (std::uint32_t i = 0; i < nodes; ++i) add(i, dst[i], spec.message_bytes, spec.start);
            break;
        }
        case Kind::tornado: {
            const auto dst = tornado_pairs(nodes);
            for (std::uint32_t i = 0; i < nodes; ++i)
                if (dst[i] != i) add(i, dst[i], spec.message_bytes, spec.start);
            break;
        }
        case Kind::trace_driven: {
            if (spec.trace_cdf.empty()) throw std::invalid_argument("workload: trace-driven kind needs a CDF");
            if (!(spec.load_fraction > 0.0)) throw std::invalid_argument("workload: load must be positive");
            // Per-host Poisson arrivals: rate = load * bps / (8 * mean size).
            const double rate_per_ns = spec.load_fraction * host_bps / (8.0 * spec.trace_cdf.mean()) / 1e9;
            struct Pending {
                TimeNs start;
                std::uint32_t src, dst;
                std::uint64_t bytes;
            };
            std::vector<Pending> pending;
            std::exponential_distribution<double> gap(rate_per_ns);
            for (std::uint32_t src = 0; src < nodes; ++src) {
                double t = static_cast<double>(spec.start);
                for (;;) {
                    t += gap(rng);
                    if (t >= static_cast<double>(spec.start + spec.horizon)) break;
                    std::uint32_t dst = static_cast<std::uint32_t>(uniform_below(rng, nodes - 1));
                    if (dst >= src) ++dst;
                    pending.push_back({static_cast<TimeNs>(t), src, dst, spec.trace_cdf.sample(rng)});
                }
            }
            std::stable_sort(pending.begin(), pending.end(), [](auto& a, auto& b) { return a.start < b.start; });
            for (const auto& p : pending) add(p.src, p.dst, p.bytes, p.start);
            break;
        }
    }
    return flows;
}

/// Tiny web-search-like CDF used when no trace file is given in tests.
inline FlowSizeCdf synthetic_websearch_cdf() {
    return FlowSizeCdf{{{4096, 0.15}, {16384, 0.3}, {65536, 0.55}, {131072, 0.7}, {1048576, 0.9}, {4194304, 1.0}}};
}

}  // namespace arcane::workload
