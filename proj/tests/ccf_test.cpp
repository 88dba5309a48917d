// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "nbnsp/ccf.hpp"

using namespace nbnsp;

namespace {
const NbnspParams truth{10.0, GammaKernel{0.3, 1.0}, GammaKernel{0.4, 1.0}};
}

TEST(CrossCorrelation, FrozenValues) {
    const CrossCorrelation g(truth);
    EXPECT_NEAR(g(0.5), 4.0141716395750780201, 1e-12);
    EXPECT_NEAR(g(-0.5), 3.1143971229256927672, 1e-12);
    EXPECT_NEAR(g.window_integral(1.0), 10.477632162920955147, 1e-10);
}

TEST(CrossCorrelation, ZeroAmplitudeIsFlat) {
    const NbnspParams flat{0.0, GammaKernel{0.3, 1.0}, GammaKernel{0.4, 1.0}};
    EXPECT_EQ(cross_correlation(flat, 0.7), 1.0);
    EXPECT_EQ(ccf_window_integral(flat, 1.5), 3.0);
    EXPECT_THROW(cross_correlation(flat, 0.0), DomainError);
}

TEST(CrossCorrelation, ExponentialWindowClosedForm) {
    const NbnspParams e{2.5, ExpKernel{2.0}, ExpKernel{3.0}};
    boost::math::quadrature::tanh_sinh<double> ts;
    const double r = 0.8;
    const double neg = ts.integrate([&](double u) { return cross_correlation(e, u); }, -r, 0.0);
    const double pos = ts.integrate([&](double u) { return cross_correlation(e, u); }, 0.0, r);
    EXPECT_NEAR(ccf_window_integral(e, r), neg + pos, 1e-12);
}

TEST(CrossCorrelation, ExponentialDensityShape) {
    const ExpKernel e1{2.0}, e2{3.0};
    const double c = 2.0 * 3.0 / 5.0;
    EXPECT_NEAR(exponential_cross_density(e1, e2, 0.4), c * std::exp(-3.0 * 0.4), 1e-15);
    EXPECT_NEAR(exponential_cross_density(e1, e2, -0.4), c * std::exp(-2.0 * 0.4), 1e-15);
}

TEST(CrossCorrelation, GammaWindowMatchesBoostIntegral) {
    const NbnspParams p{3.0, GammaKernel{1.4, 2.0}, GammaKernel{0.8, 0.5}};
    boost::math::quadrature::tanh_sinh<double> ts;
    const double r = 1.7;
    const double ref = ts.integrate([&](double u) { return cross_correlation(p, u); }, -r, 0.0)
                       + ts.integrate([&](double u) { return cross_correlation(p, u); }, 0.0, r);
    EXPECT_NEAR(ccf_window_integral(p, r), ref, 1e-10 * ref);
}

TEST(CrossCorrelation, SplitLogSumMatchesPointwise) {
    std::vector<double> lags;
    for (int i = 1; i <= 300; ++i) {
        lags.push_back((i % 3 == 0 ? -1.0 : 1.0) * 0.99 * i / 300.0);
    }
    const SignedLags split(lags);
    EXPECT_EQ(split.size(), lags.size());
    for (const auto& p : {truth, NbnspParams{2.5, ExpKernel{2.0}, ExpKernel{3.0}},
                          NbnspParams{4.0, GammaKernel{0.5, 1.0}, GammaKernel{0.5, 2.0}}}) {
        const CrossCorrelation g(p);
        const double a = g.log_sum(std::span<const double>(lags));
        EXPECT_NEAR(g.log_sum(split), a, 1e-12 * std::abs(a));
    }
}

TEST(CrossCorrelation, SignedLagsRejectZero) {
    const std::vector<double> lags = {0.1, 0.0};
    EXPECT_THROW(SignedLags{lags}, DomainError);
}
