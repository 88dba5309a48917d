// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nbnsp/pairs.hpp"
#include "nbnsp/rng.hpp"
#include "nbnsp/simulate.hpp"
#include "oracles.hpp"

using namespace nbnsp;

TEST(EnumeratePairs, MatchesQuadraticOracle) {
    SplitMix64 rng(2024);
    for (int instance = 0; instance < 1000; ++instance) {
        SimConfig c;
        c.horizon = 5.0 + 60.0 * rng.uniform();
        c.parent_intensity = 0.05 + 0.5 * rng.uniform();
        c.noise_intensity1 = rng.uniform();
        c.noise_intensity2 = rng.uniform();
        const auto p = simulate_nbnsp(c, rng());
        const double r = (0.05 + 0.4 * rng.uniform()) * c.horizon * 0.5;
        const double min_lag = instance % 4 == 0 ? 0.3 * r * rng.uniform() : 0.0;
        auto fast = enumerate_pairs(p, r, min_lag);
        auto slow = oracle::pairs(p, r, min_lag);
        std::sort(fast.begin(), fast.end());
        std::sort(slow.begin(), slow.end());
        ASSERT_EQ(fast, slow) << "instance " << instance;
    }
}

TEST(EnumeratePairs, BoundaryLagsIncluded) {
    const PointPattern p({2.0, 5.0}, {1.0, 3.0, 5.0, 6.0}, 10.0);
    auto lags = enumerate_pairs(p, 1.0);
    std::sort(lags.begin(), lags.end());
    EXPECT_EQ(lags, (std::vector<double>{-1.0, 1.0, 1.0}));
}

TEST(EnumeratePairs, RejectsBadWindows) {
    const PointPattern p({1.0}, {1.5}, 3.0);
    EXPECT_THROW(enumerate_pairs(p, 1.5), ConfigError);
    EXPECT_THROW(enumerate_pairs(p, 0.0), ConfigError);
    EXPECT_THROW(enumerate_pairs(p, 1.0, 1.0), ConfigError);
}
