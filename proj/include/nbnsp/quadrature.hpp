// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "nbnsp/errors.hpp"
#include "nbnsp/special_functions.hpp"

namespace nbnsp {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

namespace detail {

// Double-exponential abscissas on [-1, 1], stored as the distance from the
// nearest endpoint so that points next to a singular endpoint keep full
// relative precision.
struct TanhSinhNode {
    double complement;  // 1 - |x|
    double weight;
};

struct TanhSinhTable {
    static constexpr int kMaxLevel = 9;
    static constexpr double kMaxT = 6.5;

    double center_weight = std::numbers::pi / 2.0;
    // level 0: t = 1, 2, ...; level k > 0: t = odd multiples of 2^-k
    std::vector<std::vector<TanhSinhNode>> levels;

    TanhSinhTable() {
        levels.resize(kMaxLevel + 1);
        for (int level = 0; level <= kMaxLevel; ++level) {
            const double h = std::ldexp(1.0, -level);
            const int stride = level == 0 ? 1 : 2;
            const int first = 1;
            for (int k = first; k * h <= kMaxT; k += stride) {
                const double t = k * h;
                const double y = std::numbers::pi / 2.0 * std::sinh(t);
                const double e = std::exp(-2.0 * y);
                const double complement = 2.0 * e / (1.0 + e);
                const double weight =
                    std::numbers::pi / 2.0 * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
                if (complement <= 0.0 || weight <= 0.0) {
                    break;
                }
                levels[level].push_back({complement, weight});
            }
        }
    }
};

inline const TanhSinhTable& tanh_sinh_table() {
    static const TanhSinhTable table;
    return table;
}

}  // namespace detail

/// Tanh-sinh quadrature of f over [a, b], refined level by level until two
/// successive estimates differ by less than abs_tol + rel_tol * |I|.
/// Endpoints are never evaluated, so integrable endpoint singularities are
/// fine. Throws NumericalError when the finest level is reached first.
template <typename F>
QuadratureResult tanh_sinh(F&& f, double a, double b, double abs_tol, double rel_tol) {
    const auto& table = detail::tanh_sinh_table();
    const double half = 0.5 * (b - a);
    const double mid = a + half;
    QuadratureResult result;

    auto add_level = [&](const std::vector<detail::TanhSinhNode>& nodes) {
        double sum = 0.0;
        for (const auto& node : nodes) {
            const double offset = half * node.complement;
            const double left = a + offset;
            const double right = b - offset;
            if (left == a && right == b) {
                break;
            }
            if (left != a) {
                sum += node.weight * f(left);
                ++result.evaluations;
            }
            if (right != b) {
                sum += node.weight * f(right);
                ++result.evaluations;
            }
        }
        return sum;
    };

    double sum = table.center_weight * f(mid);
    result.evaluations = 1;
    sum += add_level(table.levels[0]);
    double estimate = half * sum;
    for (int level = 1; level <= detail::TanhSinhTable::kMaxLevel; ++level) {
        sum += add_level(table.levels[level]);
        const double next = half * sum * std::ldexp(1.0, -level);
        const double diff = std::abs(next - estimate);
        estimate = next;
        result.value = next;
        result.error_estimate = diff;
        if (level >= 3 && diff <= abs_tol + rel_tol * std::abs(next)) {
            return result;
        }
    }
    throw NumericalError("tanh_sinh: tolerance not reached", result.error_estimate,
                         result.evaluations);
}

/// Gauss rule for the weight x^alpha e^{-x} on (0, inf).
struct GaussLaguerreRule {
    double alpha = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Implicit QL on a symmetric tridiagonal matrix; on exit diag holds the
// eigenvalues and first_row the first components of the eigenvectors.
inline void tridiagonal_ql(std::vector<double>& diag, std::vector<double> off,
                           std::vector<double>& first_row) {
    const int n = static_cast<int>(diag.size());
    off.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(off[m]) <= std::numeric_limits<double>::epsilon() * dd) {
                    break;
                }
            }
            if (m != l) {
                if (++iter > 60) {
                    throw NumericalError("tridiagonal_ql: no convergence", std::abs(off[l]), iter);
                }
                double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
                double r = std::hypot(g, 1.0);
                g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * off[i];
                    const double b = c * off[i];
                    r = std::hypot(f, g);
                    off[i + 1] = r;
                    if (r == 0.0) {
                        diag[i + 1] -= p;
                        off[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = diag[i + 1] - p;
                    r = (diag[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    diag[i + 1] = g + p;
                    g = c * r - b;
                    f = first_row[i + 1];
                    first_row[i + 1] = s * first_row[i] + c * f;
                    first_row[i] = c * first_row[i] - s * f;
                }
                if (r == 0.0 && i >= l) {
                    continue;
                }
                diag[l] -= p;
                off[l] = g;
                off[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace detail

/// Golub-Welsch construction of the n-point generalized Gauss-Laguerre rule.
inline GaussLaguerreRule make_gauss_laguerre(int n, double alpha) {
    if (n < 1 || !(alpha > -1.0)) {
        throw DomainError("make_gauss_laguerre: need n >= 1 and alpha > -1");
    }
    std::vector<double> diag(n);
    std::vector<double> off(n > 1 ? n - 1 : 0);
    for (int i = 0; i < n; ++i) {
        diag[i] = 2.0 * i + alpha + 1.0;
    }
    for (int i = 1; i < n; ++i) {
        off[i - 1] = std::sqrt(i * (i + alpha));
    }
    std::vector<double> first_row(n, 0.0);
    first_row[0] = 1.0;
    detail::tridiagonal_ql(diag, off, first_row);

    std::vector<std::size_t> order(n);
    for (int i = 0; i < n; ++i) {
        order[i] = static_cast<std::size_t>(i);
    }
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return diag[x] < diag[y]; });

    const double mu0 = gamma_fn(alpha + 1.0);
    GaussLaguerreRule rule;
    rule.alpha = alpha;
    for (auto i : order) {
        rule.nodes.push_back(diag[i]);
        rule.weights.push_back(mu0 * first_row[i] * first_row[i]);
    }
    return rule;
}

inline constexpr int kGaussLaguerreNodes = 128;

/// The 128-point rule for x^alpha e^{-x}. Rules are built on first use and
/// kept in a small per-thread cache keyed by alpha.
inline const GaussLaguerreRule& gauss_laguerre_rule(double alpha) {
    constexpr std::size_t kCacheSize = 8;
    thread_local std::deque<GaussLaguerreRule> cache;
    for (const auto& rule : cache) {
        if (rule.alpha == alpha) {
            return rule;
        }
    }
    if (cache.size() == kCacheSize) {
        cache.pop_back();
    }
    cache.push_front(make_gauss_laguerre(kGaussLaguerreNodes, alpha));
    return cache.front();
}

}  // namespace nbnsp
