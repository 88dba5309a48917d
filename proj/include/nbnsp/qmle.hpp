// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "nbnsp/errors.hpp"
#include "nbnsp/estimate.hpp"
#include "nbnsp/model.hpp"
#include "nbnsp/nelder_mead.hpp"

namespace nbnsp {

struct FitResult {
    NbnspParams theta_hat;
    double lambda_hat1 = 0.0;
    double lambda_hat2 = 0.0;
    double objective = 0.0;  // H at theta_hat
    std::size_t n_pairs = 0;
    int iterations = 0;
    int evaluations = 0;
    bool optimizer_converged = false;
    bool converged = false;  // optimizer converged and the score check passed
    double grad_norm_fd = 0.0;
};

/// Relative score threshold: |grad H| < kScoreTolerance * (1 + |H|).
inline constexpr double kScoreTolerance = 1e-3;

namespace detail {

inline double clamp_log(double y, double lo, double hi) { return std::clamp(y, std::log(lo), std::log(hi)); }

}  // namespace detail

/// Starting point from the lag histogram: the excess of pairs over the
/// Poisson baseline sets a, the mean excess lag on each side sets the rate
/// of the kernel that controls that tail, shapes start at 1/2.
inline NbnspParams initial_guess(const QuasiLikelihood& objective, const QmleConfig& config) {
    const ParamBox box = config.effective_box();
    const auto mid = box.midpoint();
    auto fallback = [&] { return NbnspParams::from_vector(config.family, mid); };

    const double r = objective.r();
    const double base = (objective.horizon() - 2.0 * r) * objective.intensities().lambda1
                        * objective.intensities().lambda2;
    double n_pos = 0.0, n_neg = 0.0, sum_pos = 0.0, sum_neg = 0.0;
    for (double u : objective.lags()) {
        if (u > 0.0) {
            n_pos += 1.0;
            sum_pos += u;
        } else {
            n_neg += 1.0;
            sum_neg -= u;
        }
    }
    const double excess_pos = n_pos - base * r;
    const double excess_neg = n_neg - base * r;
    if (!(base > 0.0) || !(excess_pos > 0.0) || !(excess_neg > 0.0)) {
        return fallback();
    }
    // mean |lag| of the excess on each side; uniform baseline has mean r/2
    const double mean_pos = std::max((sum_pos - base * r * r / 2.0) / excess_pos, 1e-3 * r);
    const double mean_neg = std::max((sum_neg - base * r * r / 2.0) / excess_neg, 1e-3 * r);
    const double shape0 = config.family == KernelFamily::gamma ? 0.5 : 1.0;

    std::vector<double> x;
    x.push_back((excess_pos + excess_neg) / base);
    if (config.family == KernelFamily::gamma) {
        x.push_back(shape0);
        x.push_back(shape0);
    }
    x.push_back(shape0 / mean_neg);  // rate1 controls the u < 0 tail
    x.push_back(shape0 / mean_pos);  // rate2 controls the u > 0 tail
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            return fallback();
        }
        x[i] = std::clamp(x[i], box.lower()[i] * 1.01, box.upper()[i] / 1.01);
    }
    return NbnspParams::from_vector(config.family, x);
}

/// Norm of the central finite-difference gradient of H at theta. Components
/// at an active bound that point out of the box are dropped.
inline double score_norm_fd(const QuasiLikelihood& objective, const NbnspParams& theta, const ParamBox& box) {
    const auto x = theta.to_vector();
    const auto f = theta.family();
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = 1e-5 * std::max(std::abs(x[i]), 1e-3);
        auto at = [&](double xi) {
            auto y = x;
            y[i] = xi;
            return objective(NbnspParams::from_vector(f, y));
        };
        const double lo = box.lower()[i];
        const double hi = box.upper()[i];
        double d = 0.0;
        if (x[i] - step < lo) {
            d = (at(x[i] + step) - at(x[i])) / step;
            if (d < 0.0) {
                d = 0.0;  // wants to leave through the lower bound
            }
        } else if (x[i] + step > hi) {
            d = (at(x[i]) - at(x[i] - step)) / step;
            if (d > 0.0) {
                d = 0.0;
            }
        } else {
            d = (at(x[i] + step) - at(x[i] - step)) / (2.0 * step);
        }
        sq += d * d;
    }
    return std::sqrt(sq);
}

/// Quasi-maximum likelihood fit: Nelder-Mead on log-parameters, clamped to
/// the box with a quadratic penalty outside it. Never throws for
/// non-convergence; check FitResult::converged.
inline FitResult qmle_fit(const PointPattern& pattern, const QmleConfig& config) {
    config.validate_for(pattern);
    const QuasiLikelihood objective(pattern, config);
    const ParamBox box = config.effective_box();
    const NbnspParams init = config.init.value_or(initial_guess(objective, config));
    const auto family = config.family;

    auto to_params = [&](const std::vector<double>& y) {
        std::vector<double> x(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            x[i] = std::exp(detail::clamp_log(y[i], box.lower()[i], box.upper()[i]));
        }
        return NbnspParams::from_vector(family, x);
    };
    auto negative_h = [&](const std::vector<double>& y) {
        double outside = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double d = y[i] - detail::clamp_log(y[i], box.lower()[i], box.upper()[i]);
            outside += d * d;
        }
        try {
            return -objective(to_params(y)) + 1e6 * outside;
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> y0;
    for (double v : init.to_vector()) {
        y0.push_back(std::log(v));
    }
    const auto nm = nelder_mead(negative_h, y0, config.optimizer);

    FitResult fit;
    fit.theta_hat = to_params(nm.x);
    fit.lambda_hat1 = objective.intensities().lambda1;
    fit.lambda_hat2 = objective.intensities().lambda2;
    fit.objective = objective(fit.theta_hat);
    fit.n_pairs = objective.lags().size();
    fit.iterations = nm.iterations;
    fit.evaluations = nm.evaluations;
    fit.optimizer_converged = nm.converged;
    fit.grad_norm_fd = score_norm_fd(objective, fit.theta_hat, box);
    fit.converged = nm.converged && std::isfinite(fit.objective)
                    && fit.grad_norm_fd < kScoreTolerance * (1.0 + std::abs(fit.objective));
    return fit;
}

}  // namespace nbnsp
