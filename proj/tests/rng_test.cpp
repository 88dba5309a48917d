// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nbnsp/rng.hpp"

using namespace nbnsp;

namespace {

template <typename Draw>
std::pair<double, double> moments(int n, Draw draw) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    const double m = s / n;
    return {m, s2 / n - m * m};
}

}  // namespace

TEST(SplitMix64, ReferenceSequence) {
    // reference output of the published splitmix64 for seed 1234567
    SplitMix64 rng(1234567);
    EXPECT_EQ(rng(), 6457827717110365317ull);
    EXPECT_EQ(rng(), 3203168211198807973ull);
    EXPECT_EQ(rng(), 9817491932198370423ull);
}

TEST(SplitMix64, UniformRange) {
    SplitMix64 rng(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double v = rng.uniform_open();
        ASSERT_GT(v, 0.0);
        ASSERT_LT(v, 1.0);
    }
}

TEST(ChildSeed, DistinctAndDeterministic) {
    EXPECT_EQ(child_seed(42, 7), child_seed(42, 7));
    EXPECT_NE(child_seed(42, 7), child_seed(42, 8));
    EXPECT_NE(child_seed(42, 7), child_seed(43, 7));
    EXPECT_NE(child_seed(0, 0), 0u);
}

TEST(Samplers, GammaMoments) {
    for (double shape : {0.05, 0.3, 1.0, 4.5}) {
        SplitMix64 rng(11);
        const auto [m, v] = moments(400000, [&] { return sample_gamma(rng, shape); });
        EXPECT_NEAR(m, shape, 5.0 * std::sqrt(shape / 400000.0)) << shape;
        EXPECT_NEAR(v, shape, 0.03 * shape + 5.0 * std::sqrt(6.0 * shape / 400000.0)) << shape;
    }
}

TEST(Samplers, PoissonMoments) {
    for (double mean : {0.5, 2.0, 4.0, 15.0, 300.0}) {
        SplitMix64 rng(5);
        const auto [m, v] = moments(200000, [&] { return static_cast<double>(sample_poisson(rng, mean)); });
        EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / 200000.0)) << mean;
        EXPECT_NEAR(v, mean, 0.03 * mean) << mean;
    }
    SplitMix64 rng(1);
    EXPECT_EQ(sample_poisson(rng, 0.0), 0u);
}

TEST(Samplers, ExponentialAndNormalMoments) {
    SplitMix64 rng(9);
    const auto [me, ve] = moments(200000, [&] { return sample_exponential(rng, 2.0); });
    EXPECT_NEAR(me, 0.5, 0.005);
    EXPECT_NEAR(ve, 0.25, 0.006);
    const auto [mn, vn] = moments(200000, [&] { return sample_normal(rng); });
    EXPECT_NEAR(mn, 0.0, 0.012);
    EXPECT_NEAR(vn, 1.0, 0.015);
}
