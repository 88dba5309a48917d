// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "nbnsp/errors.hpp"

namespace nbnsp {

namespace detail {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double x) {
    // x is the argument of Gamma minus one
    double sum = kLanczosCoef[0];
    for (int i = 1; i < 9; ++i) {
        sum += kLanczosCoef[i] / (x + i);
    }
    return sum;
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace detail

/// log Gamma(x) for x > 0.
inline double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw DomainError("log_gamma: argument must be positive");
    }
    if (x < 0.5) {
        // Reflection keeps the Lanczos sum in its accurate range.
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    }
    const double xm1 = x - 1.0;
    const double t = xm1 + detail::kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t
           + std::log(detail::lanczos_sum(xm1));
}

/// Gamma(x) for real x that is not a nonpositive integer.
inline double gamma_fn(double x) {
    if (detail::is_nonpositive_integer(x)) {
        throw DomainError("gamma_fn: pole at nonpositive integer");
    }
    if (x < 0.5) {
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    }
    if (x > 171.0) {
        return std::exp(log_gamma(x));
    }
    const double xm1 = x - 1.0;
    const double t = xm1 + detail::kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, xm1 + 0.5) * std::exp(-t)
           * detail::lanczos_sum(xm1);
}

/// 1 / Gamma(x); zero at the poles.
inline double reciprocal_gamma(double x) {
    if (detail::is_nonpositive_integer(x)) {
        return 0.0;
    }
    if (x < 0.5) {
        // 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
        return std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x) / std::numbers::pi;
    }
    return 1.0 / gamma_fn(x);
}

inline constexpr int kKummerMaxTerms = 5000;

/// Kummer's confluent hypergeometric function M(a, b; z) = 1F1(a; b; z) for
/// z >= 0, by direct summation of the power series.
///
/// Terms are added until the next one is below 1e-15 of the running sum (and
/// past the index where the Pochhammer ratio can change sign). Throws
/// NumericalError if kKummerMaxTerms is reached first.
inline double kummer_m(double a, double b, double z) {
    if (detail::is_nonpositive_integer(b)) {
        throw DomainError("kummer_m: b must not be a nonpositive integer");
    }
    if (!(z >= 0.0) || !std::isfinite(z)) {
        throw DomainError("kummer_m: z must be finite and nonnegative");
    }
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < kKummerMaxTerms; ++k) {
        term *= (a + k) / (b + k) * z / (k + 1);
        sum += term;
        if (term == 0.0) {
            return sum;
        }
        const bool past_sign_changes = (k + 1 > -a) && (k + 1 > -b);
        if (past_sign_changes && std::abs(term) <= 1e-15 * std::abs(sum)) {
            return sum;
        }
    }
    throw NumericalError("kummer_m: series did not converge", std::abs(term / sum),
                         kKummerMaxTerms);
}

/// Precomputed term ratios of M(a, b; z) for repeated evaluation at many z
/// with fixed (a, b). Valid for z up to the bound given at construction.
class KummerSeries {
  public:
    KummerSeries() = default;

    KummerSeries(double a, double b, double z_max) : a_(a), b_(b) {
        if (detail::is_nonpositive_integer(b)) {
            throw DomainError("KummerSeries: b must not be a nonpositive integer");
        }
        // Term k+1 = term k * ratio[k] * z. Keep enough ratios for z_max.
        double term = 1.0;
        double sum = 1.0;
        for (int k = 0; k < kKummerMaxTerms; ++k) {
            const double ratio = (a + k) / ((b + k) * (k + 1));
            ratios_.push_back(ratio);
            term *= ratio * z_max;
            sum += std::abs(term);
            const bool past_sign_changes = (k + 1 > -a) && (k + 1 > -b);
            if (term == 0.0 || (past_sign_changes && std::abs(term) <= 1e-17 * sum)) {
                first_monotone_ = static_cast<int>(std::max(std::ceil(-a), std::ceil(-b))) + 1;
                return;
            }
        }
        throw NumericalError("KummerSeries: series did not converge at z_max", std::abs(term / sum),
                             kKummerMaxTerms);
    }

    double operator()(double z) const {
        double term = 1.0;
        double sum = 1.0;
        const int n = static_cast<int>(ratios_.size());
        for (int k = 0; k < n; ++k) {
            term *= ratios_[k] * z;
            sum += term;
            if (k + 1 > first_monotone_ && std::abs(term) <= 1e-17 * std::abs(sum)) {
                break;
            }
        }
        return sum;
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

  private:
    double a_ = 0.0;
    double b_ = 1.0;
    int first_monotone_ = 0;
    std::vector<double> ratios_;
};

/// Chebyshev interpolant of a smooth function on [lo, hi] from n nodes.
/// Trailing coefficients below max(rel_tol * largest, abs_tol) are dropped;
/// the defaults keep everything above rounding level.
class ChebyshevSeries {
  public:
    static constexpr int kNodes = 40;

    ChebyshevSeries() = default;

    template <typename F>
    ChebyshevSeries(F&& f, double lo, double hi, int n = kNodes, double rel_tol = 1e-14, double abs_tol = 0.0)
        : lo_(lo), hi_(hi) {
        std::vector<double> values(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const double t = std::cos(std::numbers::pi * (j + 0.5) / n);
            values[j] = f(0.5 * (hi + lo) + 0.5 * (hi - lo) * t);
        }
        coef_.resize(static_cast<std::size_t>(n));
        double largest = 0.0;
        for (int k = 0; k < n; ++k) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                sum += values[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
            }
            coef_[k] = 2.0 * sum / n;
            largest = std::max(largest, std::abs(coef_[k]));
        }
        coef_[0] *= 0.5;
        const double floor = std::max(rel_tol * largest, abs_tol);
        while (coef_.size() > 1 && std::abs(coef_.back()) <= floor) {
            coef_.pop_back();
        }
        resolved_ = static_cast<int>(coef_.size()) < n - n / 10 - 1;
    }

    /// False when the coefficients had not decayed; do not use the result.
    bool resolved() const noexcept { return resolved_; }
    std::size_t size() const noexcept { return coef_.size(); }

    double operator()(double x) const {
        const double t = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
        const double t2 = 2.0 * t;
        double b1 = 0.0;
        double b2 = 0.0;
        for (std::size_t k = coef_.size() - 1; k > 0; --k) {
            const double b0 = coef_[k] + t2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return coef_[0] + t * b1 - b2;
    }

  private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    bool resolved_ = false;
    std::vector<double> coef_;
};

}  // namespace nbnsp
