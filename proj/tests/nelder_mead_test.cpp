// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "nbnsp/nelder_mead.hpp"

using namespace nbnsp;

TEST(NelderMead, Rosenbrock) {
    auto f = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    NelderMeadSettings s;
    s.f_tol = 1e-14;
    s.x_tol = 1e-8;
    const auto res = nelder_mead(f, {-1.2, 1.0}, s);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.x[0], 1.0, 1e-6);
    EXPECT_NEAR(res.x[1], 1.0, 1e-6);
}

TEST(NelderMead, QuadraticInFiveDimensions) {
    auto f = [](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += (i + 1.0) * (x[i] - 0.1 * i) * (x[i] - 0.1 * i);
        }
        return s;
    };
    const auto res = nelder_mead(f, std::vector<double>(5, 2.0), NelderMeadSettings{});
    EXPECT_TRUE(res.converged);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(res.x[i], 0.1 * i, 1e-5);
    }
}

TEST(NelderMead, ReportsNonConvergence) {
    NelderMeadSettings s;
    s.max_iters = 5;
    const auto res = nelder_mead([](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; },
                                 {3.0, 3.0}, s);
    EXPECT_FALSE(res.converged);
    EXPECT_EQ(res.iterations, 5);
}

TEST(NelderMead, InfiniteValuesAreAvoided) {
    auto f = [](const std::vector<double>& x) {
        return x[0] < 0.0 ? std::numeric_limits<double>::infinity() : (x[0] - 0.5) * (x[0] - 0.5);
    };
    const auto res = nelder_mead(f, {0.1}, NelderMeadSettings{});
    EXPECT_NEAR(res.x[0], 0.5, 1e-5);
}

TEST(NelderMead, SettingsValidation) {
    NelderMeadSettings s;
    s.x_tol = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
}
