#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "arcane/lb/load_balancer.hpp"

using namespace arcane;
using namespace arcane::lb;

TEST(LoadBalancer, EcmpIsStatic) {
    EcmpBalancer b(1u << 16, 42, 7);
    Rng r(1);
    const auto ev = b.pick_ev(r, 0);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(b.pick_ev(r, i), ev);
    b.notify_failure(5);
    b.notify_ack(ev + 1, false, 6);
    EXPECT_EQ(b.pick_ev(r, 7), ev);
}

TEST(LoadBalancer, EcmpDiffersAcrossFlows) {
    int distinct = 0;
    Rng r(1);
    const auto base = EcmpBalancer(1u << 16, 42, 0).pick_ev(r, 0);
    for (std::uint32_t f = 1; f < 100; ++f) distinct += EcmpBalancer(1u << 16, 42, f).pick_ev(r, 0) != base;
    EXPECT_GE(distinct, 98);
}

// One-sample Kolmogorov-Smirnov against the discrete uniform on [0, 2^16):
// reject at alpha = 0.01 when sqrt(n) * D > 1.628.
TEST(LoadBalancer, OpsIsUniform) {
    OpsBalancer b(1u << 16);
    Rng r(7);
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = (b.pick_ev(r, 0) + 0.5) / 65536.0;
    std::sort(xs.begin(), xs.end());
    double d = 0;
    for (std::size_t i = 0; i < n; ++i)
        d = std::max({d, std::abs((i + 1.0) / n - xs[i]), std::abs(xs[i] - static_cast<double>(i) / n)});
    EXPECT_LT(std::sqrt(static_cast<double>(n)) * d, 1.628);
}

TEST(LoadBalancer, OpsIgnoresFeedback) {
    OpsBalancer a(1u << 16), b(1u << 16);
    Rng ra(3), rb(3);
    a.notify_ack(5, false, 1);
    a.notify_failure(2);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.pick_ev(ra, i), b.pick_ev(rb, i));
}

TEST(LoadBalancer, ArcaneDelegates) {
    ArcaneConfig c;
    c.bdp_packets = 0;
    c.freezing_timeout = 100;
    ArcaneBalancer b(c);
    Rng r(1);
    for (EntropyValue ev : {11, 22, 33}) b.notify_ack(ev, false, 0);
    b.notify_ack(44, true, 0);  // marked: discarded
    EXPECT_EQ(b.state().num_valid(), 3u);
    EXPECT_EQ(b.pick_ev(r, 0), 11u);
    b.notify_failure(10);
    EXPECT_TRUE(b.state().is_freezing());
}

TEST(LoadBalancer, Factory) {
    BalancerSettings s;
    for (auto k : {Kind::arcane, Kind::ops, Kind::ecmp}) {
        s.kind = k;
        EXPECT_EQ(make_balancer(s, 1, 2)->kind(), k);
        EXPECT_EQ(parse_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_kind("spray"), std::invalid_argument);
}
