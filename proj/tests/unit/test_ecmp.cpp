#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "arcane/net/ecmp.hpp"

using namespace arcane;
using namespace arcane::net;

TEST(Ecmp, SinglePortIsZero) {
    EcmpHasher h(5);
    PacketHeader hdr;
    for (EntropyValue ev = 0; ev < 100; ++ev) {
        hdr.ev = ev;
        EXPECT_EQ(ecmp_select(h, hdr, 1), 0u);
    }
}

TEST(Ecmp, Deterministic) {
    EcmpHasher a(99), b(99);
    PacketHeader hdr{3, 9, 17, 12345};
    EXPECT_EQ(ecmp_select(a, hdr, 32), ecmp_select(a, hdr, 32));
    EXPECT_EQ(ecmp_select(a, hdr, 32), ecmp_select(b, hdr, 32));
}

TEST(Ecmp, InRange) {
    EcmpHasher h(1);
    for (std::uint32_t ports : {2u, 3u, 7u, 32u, 64u})
        for (EntropyValue ev = 0; ev < 2000; ++ev) EXPECT_LT(h.select(1, 2, 3, ev, ports), ports);
}

// Pearson chi-square over all 2^16 EVs of one flow, 32 ports, 31 degrees of
// freedom. The 0.999 quantile of chi2(31) is 61.1.
TEST(Ecmp, UniformOverEntropySpace) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        EcmpHasher h(seed);
        std::vector<double> counts(32, 0);
        for (std::uint32_t ev = 0; ev < (1u << 16); ++ev) counts[h.select(4, 11, 7, ev, 32)] += 1;
        const double expected = 65536.0 / 32;
        double chi2 = 0;
        for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
        EXPECT_LT(chi2, 61.1) << "seed " << seed;
    }
}

TEST(Ecmp, SwitchSeedsDecorrelate) {
    EcmpHasher a(1), b(2);
    int same = 0;
    for (EntropyValue ev = 0; ev < 10000; ++ev) same += a.select(0, 1, 0, ev, 8) == b.select(0, 1, 0, ev, 8);
    EXPECT_NEAR(same / 10000.0, 1.0 / 8, 0.02);
}
