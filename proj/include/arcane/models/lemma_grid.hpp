#pragma once

#include <algorithm>
#include <cstdint>
#include <string_view>
#include <vector>

#include "arcane/models/binomial.hpp"

namespace arcane::models {

enum class Lemma { tail, conditional };

inline std::string_view to_string(Lemma l) { return l == Lemma::tail ? "tail" : "conditional"; }

struct LemmaGrid {
    std::vector<std::uint64_t> ns{16, 32, 64, 128, 256, 512, 1024};
    double x_step = 0.25;
    double bound_scale = 1.0;  // != 1 only for negative controls
};

struct LemmaPoint {
    Lemma lemma;
    std::uint64_t n, k;
    double x;
    LemmaValue value;
};

/// Every admissible k; x from the domain minimum to one past where the
/// event becomes impossible (exact = 0 beyond that).
template <class F>
void sweep_lemma(Lemma lemma, const LemmaGrid& grid, F&& visit) {
    const double x_min = lemma == Lemma::tail ? 16.0 : 3.5;
    for (auto n : grid.ns) {
        const std::uint64_t k_max = lemma == Lemma::tail ? n : n / 2;
        for (std::uint64_t k = 0; k <= k_max; ++k) {
            const double x_max = std::max(x_min, static_cast<double>(k)) + 1.0;
            const BinomialLogPmf pmf{k, 1.0 / static_cast<double>(n)};
            for (std::uint64_t i = 0;; ++i) {
                const double x = x_min + static_cast<double>(i) * grid.x_step;
                if (x > x_max) break;
                const auto v = lemma == Lemma::tail ? lemma_tail_check(pmf, x, grid.bound_scale)
                                                    : lemma_conditional_check(pmf, x, grid.bound_scale);
                visit(LemmaPoint{lemma, n, k, x, v});
            }
        }
    }
}

}  // namespace arcane::models
