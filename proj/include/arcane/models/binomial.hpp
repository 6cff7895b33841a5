#pragma once

// Exact binomial tail quantities in log space, and the two tail lemmas used
// by the recycled balls-into-bins drift argument.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace arcane::models {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// log P[B = j] for B ~ Binomial(trials, p).
inline double binomial_log_pmf(std::uint64_t trials, double p, std::uint64_t j) {
    if (j > trials) return neg_inf;
    if (p <= 0.0) return j == 0 ? 0.0 : neg_inf;
    if (p >= 1.0) return j == trials ? 0.0 : neg_inf;
    const double t = static_cast<double>(trials), s = static_cast<double>(j);
    return std::lgamma(t + 1) - std::lgamma(s + 1) - std::lgamma(t - s + 1) + s * std::log(p) +
           (t - s) * std::log1p(-p);
}

/// Neumaier-compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0, comp_ = 0.0;
};

/// log of sum_i exp(terms[i]), compensated.
inline double log_sum_exp(const std::vector<double>& terms) {
    double peak = neg_inf;
    for (double t : terms) peak = std::max(peak, t);
    if (peak == neg_inf) return neg_inf;
    CompensatedSum acc;
    for (double t : terms) acc.add(std::exp(t - peak));
    return peak + std::log(acc.value());
}

/// Terms this far below the largest one vanish when exponentiated relative
/// to it, so summation past the mode can stop there without changing the result.
inline constexpr double underflow_gap = 760.0;

inline bool past_mode(std::uint64_t trials, double p, std::uint64_t j) {
    return static_cast<double>(j) > (static_cast<double>(trials) + 1.0) * p;
}

inline std::uint64_t ceil_threshold(double x) {
    return x <= 0.0 ? 0 : static_cast<std::uint64_t>(std::ceil(x));
}

struct LemmaValue {
    double exact = 0.0;
    double bound = 0.0;
    double log_exact = neg_inf;
    double log_bound = 0.0;

    /// exact <= bound up to a relative tolerance, compared in log space.
    bool holds(double rel_tol = 1e-12) const {
        if (log_exact == neg_inf) return true;
        return log_exact <= log_bound + std::log1p(rel_tol);
    }
};

/// Lazily filled log-pmf cache for one Binomial(trials, p).
class BinomialLogPmf {
public:
    BinomialLogPmf(std::uint64_t trials, double p) : trials_(trials), p_(p) {}
    std::uint64_t trials() const noexcept { return trials_; }
    double p() const noexcept { return p_; }
    double operator()(std::uint64_t j) const {
        if (j > trials_) return neg_inf;
        while (cache_.size() <= j) cache_.push_back(binomial_log_pmf(trials_, p_, cache_.size()));
        return cache_[j];
    }

private:
    std::uint64_t trials_;
    double p_;
    mutable std::vector<double> cache_;
};

inline double binomial_log_upper_tail(const BinomialLogPmf& pmf, std::uint64_t from) {
    if (from == 0) return 0.0;
    if (from > pmf.trials()) return neg_inf;
    std::vector<double> terms;
    double peak = neg_inf;
    for (std::uint64_t j = from; j <= pmf.trials(); ++j) {
        const double t = pmf(j);
        peak = std::max(peak, t);
        terms.push_back(t);
        if (past_mode(pmf.trials(), pmf.p(), j) && t < peak - underflow_gap) break;
    }
    return log_sum_exp(terms);
}

/// log P[B >= from] for B ~ Binomial(trials, p).
inline double binomial_log_upper_tail(std::uint64_t trials, double p, std::uint64_t from) {
    return binomial_log_upper_tail(BinomialLogPmf{trials, p}, from);
}

/// B ~ Binomial(k, 1/n), x >= 16: exact P[B >= ceil(x)] against e^{-5/4 (x-1)}.
inline LemmaValue lemma_tail_check(const BinomialLogPmf& pmf, double x, double bound_scale = 1.0) {
    LemmaValue v;
    v.log_exact = binomial_log_upper_tail(pmf, ceil_threshold(x));
    v.exact = std::exp(v.log_exact);
    v.log_bound = -1.25 * (x - 1.0) + std::log(bound_scale);
    v.bound = std::exp(v.log_bound);
    return v;
}

inline LemmaValue lemma_tail_check(std::uint64_t n, std::uint64_t k, double x, double bound_scale = 1.0) {
    return lemma_tail_check(BinomialLogPmf{k, 1.0 / static_cast<double>(n)}, x, bound_scale);
}

/// B ~ Binomial(k, 1/n), k <= n/2, x >= 7/2:
/// (E[B | B >= ceil(x)] - x) P[B >= ceil(x)] = sum_{j >= ceil(x)} (j - x) P[B = j]
/// against (1/(x-1)) e^{-(x - 1/2)}.
inline LemmaValue lemma_conditional_check(const BinomialLogPmf& pmf, double x, double bound_scale = 1.0) {
    LemmaValue v;
    const std::uint64_t from = ceil_threshold(x), k = pmf.trials();
    const double p = pmf.p();
    std::vector<double> terms;
    double peak = neg_inf;
    for (std::uint64_t j = from; j <= k; ++j) {
        const double excess = static_cast<double>(j) - x;
        if (excess <= 0.0) continue;
        const double t = std::log(excess) + pmf(j);
        peak = std::max(peak, t);
        terms.push_back(t);
        if (past_mode(k, p, j) && t < peak - underflow_gap) break;
    }
    v.log_exact = log_sum_exp(terms);
    v.exact = v.log_exact == neg_inf ? 0.0 : std::exp(v.log_exact);
    v.log_bound = -std::log(x - 1.0) - (x - 0.5) + std::log(bound_scale);
    v.bound = std::exp(v.log_bound);
    return v;
}

inline LemmaValue lemma_conditional_check(std::uint64_t n, std::uint64_t k, double x, double bound_scale = 1.0) {
    return lemma_conditional_check(BinomialLogPmf{k, 1.0 / static_cast<double>(n)}, x, bound_scale);
}

}  // namespace arcane::models
