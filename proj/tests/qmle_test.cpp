// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nbnsp/experiments.hpp"
#include "nbnsp/qmle.hpp"
#include "nbnsp/simulate.hpp"

using namespace nbnsp;

TEST(QmleFit, RecoversTableOneTruthAtLongHorizon) {
    SimConfig c;
    c.horizon = 10000.0;
    const auto p = simulate_nbnsp(c, 42);
    const auto fit = qmle_fit(p, QmleConfig{});
    ASSERT_TRUE(fit.converged);
    const auto x = fit.theta_hat.to_vector();
    // replication std at T = 10000 from the published Monte Carlo study
    const std::vector<double> truth = {10.0, 0.3, 0.4, 1.0, 1.0};
    const std::vector<double> sd = {0.564, 0.0169, 0.0164, 0.191, 0.15};
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_NEAR(x[i], truth[i], 4.0 * sd[i]) << i;
    }
    EXPECT_LT(fit.grad_norm_fd, kScoreTolerance * (1.0 + std::abs(fit.objective)));
    EXPECT_NEAR(fit.lambda_hat1, 0.2, 0.03);
    EXPECT_NEAR(fit.lambda_hat2, 0.4, 0.05);
}

TEST(QmleFit, ExponentialRoundTrip) {
    SimConfig c;
    c.parent_intensity = 0.4;
    c.kernel1 = ExpKernel{2.0};
    c.kernel2 = ExpKernel{3.0};
    c.horizon = 5000.0;
    ASSERT_DOUBLE_EQ(true_amplitude(c), 2.5);
    QmleConfig q;
    q.family = KernelFamily::exponential;
    const auto fit = qmle_fit(simulate_nbnsp(c, 3), q);
    ASSERT_TRUE(fit.converged);
    const auto x = fit.theta_hat.to_vector();
    EXPECT_NEAR(x[0], 2.5, 0.4);
    EXPECT_NEAR(x[1], 2.0, 0.5);
    EXPECT_NEAR(x[2], 3.0, 0.7);
}

TEST(QmleFit, InitialGuessIsInsideBox) {
    SimConfig c;
    c.horizon = 3000.0;
    const auto p = simulate_nbnsp(c, 5);
    QmleConfig q;
    const QuasiLikelihood h(p, q);
    const auto init = initial_guess(h, q).to_vector();
    EXPECT_TRUE(q.effective_box().contains(init));
    // the lag histogram puts the amplitude guess in the right decade
    EXPECT_GT(init[0], 3.0);
    EXPECT_LT(init[0], 30.0);
}

TEST(QmleFit, IndependentComponentsPushAmplitudeToZero) {
    const double T = 5000.0;
    const PointPattern p(simulate_poisson(0.2, T, 1), simulate_poisson(0.4, T, 2), T);
    const auto fit = qmle_fit(p, QmleConfig{});
    EXPECT_LT(fit.theta_hat.a, 1.0);
}

TEST(QmleFit, EmptyComponentIsAnEstimationError) {
    const PointPattern p({1.0, 2.0}, {}, 10.0);
    EXPECT_THROW(qmle_fit(p, QmleConfig{}), EstimationError);
}

TEST(QmleFit, ExplicitInitAndBoxAreHonoured) {
    SimConfig c;
    c.horizon = 2000.0;
    const auto p = simulate_nbnsp(c, 9);
    QmleConfig q;
    q.box = ParamBox({1.0, 0.1, 0.1, 0.5, 0.5}, {5.0, 1.0, 1.0, 2.0, 2.0});
    q.init = NbnspParams(2.0, GammaKernel{0.5, 1.0}, GammaKernel{0.5, 1.0});
    const auto fit = qmle_fit(p, q);
    EXPECT_TRUE(q.box->contains(fit.theta_hat.to_vector()));
    // truth a = 10 lies outside; the fit sits on the upper bound
    EXPECT_NEAR(fit.theta_hat.a, 5.0, 1e-3);
}
