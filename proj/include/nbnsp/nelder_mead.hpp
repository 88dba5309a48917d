// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "nbnsp/errors.hpp"

namespace nbnsp {

struct NelderMeadSettings {
    int max_iters = 5000;
    double f_tol = 1e-8;
    double x_tol = 1e-6;
    double init_step = 0.25;
    int restarts = 1;

    void validate() const {
        if (max_iters < 1 || !(f_tol > 0.0) || !(x_tol > 0.0) || !(init_step > 0.0) || restarts < 0) {
            throw ConfigError("optimizer: max_iters >= 1, f_tol, x_tol, init_step > 0, restarts >= 0");
        }
    }
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Minimizes f from x0 with the standard Nelder-Mead coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// Stops when the simplex's spread of values is at most f_tol and every
/// vertex lies within x_tol (max norm) of the best one. With restarts > 0
/// a fresh simplex is built around each converged optimum and the search
/// reruns; the best point seen is returned.
template <typename F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadSettings& settings) {
    settings.validate();
    const std::size_t n = x0.size();
    NelderMeadResult result;
    result.x = x0;
    result.value = f(x0);
    result.evaluations = 1;

    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return f(x);
    };

    for (int round = 0; round <= settings.restarts; ++round) {
        std::vector<std::vector<double>> simplex(n + 1, result.x);
        std::vector<double> values(n + 1, result.value);
        for (std::size_t i = 0; i < n; ++i) {
            simplex[i + 1][i] += settings.init_step;
            values[i + 1] = eval(simplex[i + 1]);
        }
        std::vector<std::size_t> order(n + 1);
        bool converged = false;
        int iter = 0;
        for (; iter < settings.max_iters; ++iter) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](auto a, auto b) { return values[a] < values[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second = order[n - 1];

            double spread = 0.0;
            double diameter = 0.0;
            for (std::size_t v = 0; v <= n; ++v) {
                spread = std::max(spread, std::abs(values[v] - values[best]));
                for (std::size_t i = 0; i < n; ++i) {
                    diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[best][i]));
                }
            }
            if (spread <= settings.f_tol && diameter <= settings.x_tol) {
                converged = true;
                break;
            }

            std::vector<double> centroid(n, 0.0);
            for (std::size_t v = 0; v <= n; ++v) {
                if (v == worst) {
                    continue;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    centroid[i] += simplex[v][i] / static_cast<double>(n);
                }
            }
            auto along = [&](double t) {
                std::vector<double> p(n);
                for (std::size_t i = 0; i < n; ++i) {
                    p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
                }
                return p;
            };

            auto reflected = along(-1.0);
            const double f_r = eval(reflected);
            if (f_r < values[best]) {
                auto expanded = along(-2.0);
                const double f_e = eval(expanded);
                if (f_e < f_r) {
                    simplex[worst] = std::move(expanded);
                    values[worst] = f_e;
                } else {
                    simplex[worst] = std::move(reflected);
                    values[worst] = f_r;
                }
                continue;
            }
            if (f_r < values[second]) {
                simplex[worst] = std::move(reflected);
                values[worst] = f_r;
                continue;
            }
            if (f_r < values[worst]) {
                auto outside = along(-0.5);
                const double f_c = eval(outside);
                if (f_c <= f_r) {
                    simplex[worst] = std::move(outside);
                    values[worst] = f_c;
                    continue;
                }
            } else {
                auto inside = along(0.5);
                const double f_c = eval(inside);
                if (f_c < values[worst]) {
                    simplex[worst] = std::move(inside);
                    values[worst] = f_c;
                    continue;
                }
            }
            for (std::size_t v = 0; v <= n; ++v) {
                if (v == best) {
                    continue;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
                }
                values[v] = eval(simplex[v]);
            }
        }
        result.iterations += iter;
        const auto best = static_cast<std::size_t>(
            std::min_element(values.begin(), values.end()) - values.begin());
        if (values[best] <= result.value) {
            result.x = simplex[best];
            result.value = values[best];
        }
        result.converged = converged;
        if (!converged) {
            break;
        }
    }
    return result;
}

}  // namespace nbnsp
