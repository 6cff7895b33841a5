#include <gtest/gtest.h>

#include <set>

#include "arcane/util/rng.hpp"

using namespace arcane;

TEST(Rng, DerivedStreamsAreReproducible) {
    auto a = derive_rng(7, "lb", 3), b = derive_rng(7, "lb", 3);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, DerivedStreamsDifferByEntity) {
    std::set<std::uint64_t> first;
    for (std::uint64_t e = 0; e < 1000; ++e) first.insert(derive_rng(1, "lb", e)());
    EXPECT_EQ(first.size(), 1000u);
    EXPECT_NE(derive_rng(1, "lb", 0)(), derive_rng(1, "red", 0)());
    EXPECT_NE(derive_rng(1, "lb", 0)(), derive_rng(2, "lb", 0)());
}

TEST(Rng, UniformBelowStaysInRange) {
    Rng r(3);
    for (std::uint64_t bound : {1ull, 2ull, 7ull, 65536ull})
        for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(r, bound), bound);
}

TEST(Rng, MixIsABijectionOnSamples) {
    std::set<std::uint64_t> out;
    for (std::uint64_t i = 0; i < 10000; ++i) out.insert(mix64(i));
    EXPECT_EQ(out.size(), 10000u);
}
