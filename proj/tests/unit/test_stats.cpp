#include <gtest/gtest.h>

#include <cmath>

#include "arcane/util/stats.hpp"

using namespace arcane::stats;

TEST(Stats, MeanCi) {
    const auto c = mean_ci({1, 2, 3, 4, 5});
    EXPECT_DOUBLE_EQ(c.mean, 3.0);
    // t(0.975, 4) = 2.776; sd = sqrt(2.5)
    EXPECT_NEAR(c.hi - c.mean, 2.7764451 * std::sqrt(2.5) / std::sqrt(5.0), 1e-6);
    EXPECT_NEAR(c.mean - c.lo, c.hi - c.mean, 1e-12);
}

TEST(Stats, MeanCiSinglePoint) {
    const auto c = mean_ci({4.0});
    EXPECT_EQ(c.mean, 4.0);
    EXPECT_EQ(c.lo, 4.0);
    EXPECT_EQ(c.hi, 4.0);
}

TEST(Stats, SignTest) {
    EXPECT_NEAR(sign_test_p(15, 20), 0.020694, 1e-6);
    EXPECT_NEAR(sign_test_p(20, 20), std::pow(0.5, 20), 1e-15);
    EXPECT_DOUBLE_EQ(sign_test_p(0, 20), 1.0);
    EXPECT_GT(sign_test_p(14, 20), 0.05);
}
