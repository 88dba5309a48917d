// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "nbnsp/simulate.hpp"

using namespace nbnsp;

TEST(Simulate, SameSeedSamePattern) {
    SimConfig c;
    EXPECT_EQ(simulate_nbnsp(c, 42), simulate_nbnsp(c, 42));
    EXPECT_NE(simulate_nbnsp(c, 42), simulate_nbnsp(c, 43));
}

TEST(Simulate, RatesMatchIntensities) {
    SimConfig c;
    c.horizon = 200000.0;
    c.noise_intensity1 = 0.1;
    c.noise_intensity2 = 0.3;
    const auto p = simulate_nbnsp(c, 1);
    // cluster counts make the variance larger than Poisson; 5 sd of the
    // compound count is about 1.5% here
    EXPECT_NEAR(p.times1().size() / c.horizon, c.intensity(1), 0.02 * c.intensity(1));
    EXPECT_NEAR(p.times2().size() / c.horizon, c.intensity(2), 0.02 * c.intensity(2));
}

TEST(Simulate, EventsInsideWindowAndSorted) {
    SimConfig c;
    c.horizon = 500.0;
    const auto p = simulate_nbnsp(c, 5);
    for (int i = 1; i <= 2; ++i) {
        const auto t = p.component(i);
        for (std::size_t k = 0; k < t.size(); ++k) {
            ASSERT_GE(t[k], 0.0);
            ASSERT_LE(t[k], c.horizon);
            if (k > 0) {
                ASSERT_LT(t[k - 1], t[k]);
            }
        }
    }
}

TEST(Simulate, TinyParentIntensityGivesEmptyPattern) {
    SimConfig c;
    c.parent_intensity = 1e-12;
    c.horizon = 10.0;
    const auto p = simulate_nbnsp(c, 3);
    EXPECT_TRUE(p.times1().empty());
    EXPECT_TRUE(p.times2().empty());
}

TEST(Simulate, ExponentialKernels) {
    SimConfig c;
    c.kernel1 = ExpKernel{2.0};
    c.kernel2 = ExpKernel{3.0};
    c.horizon = 2000.0;
    const auto p = simulate_nbnsp(c, 8);
    EXPECT_GT(p.times1().size(), 200u);
}

TEST(Simulate, SparseParentsRate) {
    SimConfig c;
    c.parent_intensity = 0.01;
    c.offspring_mean1 = 3.0;
    c.offspring_mean2 = 3.0;
    c.kernel1 = GammaKernel{2.0, 4.0};
    c.kernel2 = GammaKernel{2.0, 4.0};
    c.horizon = 1e6;
    const auto p = simulate_nbnsp(c, 17);
    EXPECT_NEAR(p.times1().size() / c.horizon, 0.03, 0.0015);
}

TEST(Simulate, ValidatesConfig) {
    SimConfig c;
    c.parent_intensity = -1.0;
    EXPECT_THROW(simulate_nbnsp(c, 1), ConfigError);
    SimConfig d;
    d.kernel2 = ExpKernel{1.0};
    EXPECT_THROW(simulate_nbnsp(d, 1), ConfigError);
    SimConfig e;
    e.noise_intensity1 = std::nan("");
    EXPECT_THROW(simulate_nbnsp(e, 1), ConfigError);
}

TEST(SimulatePoisson, CountAndOrder) {
    const auto t = simulate_poisson(2.0, 50000.0, 4);
    EXPECT_NEAR(t.size(), 100000.0, 5.0 * std::sqrt(100000.0));
    EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
}

TEST(PointPattern, Validation) {
    EXPECT_THROW(PointPattern({1.0, 0.5}, {}, 2.0), ConfigError);
    EXPECT_THROW(PointPattern({1.0, 1.0}, {}, 2.0), ConfigError);
    EXPECT_THROW(PointPattern({3.0}, {}, 2.0), ConfigError);
    EXPECT_THROW(PointPattern({}, {}, 0.0), ConfigError);
    const PointPattern p({0.5, 1.0}, {1.0, 1.5}, 2.0);
    EXPECT_EQ(p.coincident_count(), 1u);
}
