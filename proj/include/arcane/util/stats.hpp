#pragma once

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace arcane::stats {

struct MeanCi {
    double mean = 0, lo = 0, hi = 0, stddev = 0;
    std::size_t n = 0;
};

/// Mean with a two-sided Student-t confidence interval.
inline MeanCi mean_ci(const std::vector<double>& xs, double confidence = 0.95) {
    MeanCi r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double s = 0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(r.n);
    if (r.n < 2) {
        r.lo = r.hi = r.mean;
        return r;
    }
    double ss = 0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(r.n - 1));
    if (r.stddev == 0) {
        r.lo = r.hi = r.mean;
        return r;
    }
    const boost::math::students_t dist(static_cast<double>(r.n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, (1 - confidence) / 2));
    const double half = t * r.stddev / std::sqrt(static_cast<double>(r.n));
    r.lo = r.mean - half;
    r.hi = r.mean + half;
    return r;
}

/// One-sided exact sign test: P[X >= wins] for X ~ Binomial(trials, 1/2).
/// Ties must be removed by the caller.
inline double sign_test_p(std::size_t wins, std::size_t trials) {
    if (wins > trials) throw std::invalid_argument("sign test: wins > trials");
    if (trials == 0) return 1.0;
    if (wins == 0) return 1.0;
    const boost::math::binomial_distribution<double> dist(static_cast<double>(trials), 0.5);
    return boost::math::cdf(boost::math::complement(dist, static_cast<double>(wins - 1)));
}

}  // namespace arcane::stats
