// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbnsp/errors.hpp"
#include "nbnsp/model.hpp"
#include "nbnsp/quadrature.hpp"
#include "nbnsp/special_functions.hpp"

namespace nbnsp {

enum class PdfMethod { automatic, series, quadrature };

/// Distance below which alpha1 + alpha2 counts as an integer; the Kummer
/// expansion has Gamma(1 - s) and Gamma(s - 1) prefactors that blow up there.
inline constexpr double kIntegerGuard = 1e-3;
/// Largest (l1 + l2)|u| evaluated by the series. The two Kummer terms cancel
/// to relative size about exp(-(l1 + l2)|u|).
inline constexpr double kSeriesMaxZ = 8.0;
/// Largest (|t1| + |t2|) / |t1 + t2| accepted from the two series terms;
/// beyond it the quadrature form is used.
inline constexpr double kMaxCancellation = 1e3;
/// Smallest (l1 + l2)|u| handed to the 128-point Gauss-Laguerre rule.
inline constexpr double kLaguerreMinZ = 0.5;
/// Batched log-sums switch to interpolation in log|u| above this many lags.
inline constexpr std::size_t kPanelMinLags = 1024;
inline constexpr int kPanelNodes = 20;
/// Accuracy per lag of the interpolated log(1 + a p): relative to the
/// largest coefficient of a panel, and absolute. The density itself carries
/// relative error near 1e-14 from cancellation in the series.
inline constexpr double kPanelRelTol = 1e-13;
inline constexpr double kPanelAbsTol = 1e-14;

/// Density of D = Y2 - Y1 with Yi ~ Gamma(shape_i, rate_i) independent,
///
///     p(u) = integral f1(s) f2(u + s) ds,
///
/// i.e. the bilateral gamma density. For u > 0 the tail decays at rate2; for
/// u < 0 the same formulas run with the kernels swapped on -u, so
/// p(u; k1, k2) == p(-u; k2, k1) holds bit for bit.
class BilateralGamma {
  public:
    BilateralGamma(const GammaKernel& k1, const GammaKernel& k2)
        : positive_(k2, k1), negative_(k1, k2) {}

    double pdf(double u, PdfMethod method = PdfMethod::automatic) const {
        check_argument(u);
        return u > 0.0 ? positive_.pdf(u, method) : negative_.pdf(-u, method);
    }

    /// p(u) |u|^(1 - s), bounded near the origin when s = alpha1 + alpha2 < 1.
    double pdf_scaled(double u) const {
        if (!std::isfinite(u)) {
            throw DomainError("bilateral_gamma_pdf: u must be finite");
        }
        return u >= 0.0 ? positive_.scaled(u) : negative_.scaled(-u);
    }

    /// Probability mass on (0, r] and [-r, 0).
    double mass_positive(double r) const { return positive_.mass(r); }
    double mass_negative(double r) const { return negative_.mass(r); }

    /// sum of log(1 + a p(u)) over lags split by sign: positive lags and
    /// their logs, then |u| and log|u| of the negative lags.
    double sum_log1p(double a, std::span<const double> pos, std::span<const double> pos_log,
                     std::span<const double> neg, std::span<const double> neg_log) const {
        return positive_.sum_log1p(a, pos, pos_log) + negative_.sum_log1p(a, neg, neg_log);
    }

    double total_shape() const noexcept { return positive_.s; }

    bool series_admissible() const noexcept { return positive_.series_ok; }

  private:
    static void check_argument(double u) {
        if (!std::isfinite(u)) {
            throw DomainError("bilateral_gamma_pdf: u must be finite");
        }
        if (u == 0.0) {
            throw DomainError("bilateral_gamma_pdf: undefined at u = 0");
        }
    }

    // One half-line: density at x > 0 of a variable whose right tail decays
    // with the "lead" kernel and whose left side comes from the "other".
    struct Side {
        double ap, lp;  // lead kernel: shape, rate
        double am, lm;  // other kernel
        double L, s;
        double log_pre_series = 0.0;
        double c1 = 0.0, c2 = 0.0;
        double log_pre_quad = 0.0;
        bool series_ok = false;
        KummerSeries m1, m2;

        Side(const GammaKernel& lead, const GammaKernel& other)
            : ap(lead.shape), lp(lead.rate), am(other.shape), lm(other.rate) {
            L = lp + lm;
            s = ap + am;
            series_ok = std::abs(s - std::round(s)) > kIntegerGuard;
            const double log_rates = ap * std::log(lp) + am * std::log(lm);
            log_pre_quad = log_rates + (1.0 - s) * std::log(L) - log_gamma(ap) - log_gamma(am);
            if (series_ok) {
                log_pre_series = log_rates - log_gamma(ap);
                c1 = gamma_fn(1.0 - s) * reciprocal_gamma(1.0 - ap);
                c2 = gamma_fn(s - 1.0) * reciprocal_gamma(am) * std::pow(L, 1.0 - s);
                m1 = KummerSeries(am, s, kSeriesMaxZ);
                m2 = KummerSeries(1.0 - ap, 2.0 - s, kSeriesMaxZ);
            }
        }

        double kummer1(double z) const { return z <= kSeriesMaxZ ? m1(z) : kummer_m(am, s, z); }
        double kummer2(double z) const {
            return z <= kSeriesMaxZ ? m2(z) : kummer_m(1.0 - ap, 2.0 - s, z);
        }

        struct Terms {
            double t1, t2;
            // more than three digits lost to cancellation between the terms
            bool stable() const { return std::abs(t1) + std::abs(t2) <= kMaxCancellation * std::abs(t1 + t2); }
        };

        // The two Kummer terms without the common factor exp(log_pre_series - lp x).
        Terms terms(double x) const {
            const double z = L * x;
            const double t1 = c1 == 0.0 ? 0.0 : c1 * std::exp((s - 1.0) * std::log(x)) * kummer1(z);
            return {t1, c2 * kummer2(z)};
        }

        double series(double x) const {
            if (!series_ok) {
                throw DomainError("bilateral_gamma_pdf: series undefined for integer alpha1 + alpha2 (s = "
                                  + std::to_string(s) + ")");
            }
            const auto t = terms(x);
            return std::exp(log_pre_series - lp * x) * (t.t1 + t.t2);
        }

        // J(z) = int_0^inf v^(am-1) (z + v)^(ap-1) e^(-v) dv
        double laguerre_integral(double z) const {
            const auto& rule = gauss_laguerre_rule(am - 1.0);
            double sum = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                sum += rule.weights[i] * std::pow(z + rule.nodes[i], ap - 1.0);
            }
            return sum;
        }

        double split_integral(double z) const {
            constexpr double kRelTol = 1e-14;
            auto near = [&](double v) {
                return std::exp((am - 1.0) * std::log(v) + (ap - 1.0) * std::log(z + v) - v);
            };
            const double low = tanh_sinh(near, 0.0, z, 0.0, kRelTol).value;
            // v = z e^t on [z, v_max]
            const double v_max = 100.0 + 2.0 * (am + ap);
            auto far = [&](double t) {
                const double v = z * std::exp(t);
                return std::exp(am * std::log(v) + (ap - 1.0) * std::log(z + v) - v);
            };
            const double high = tanh_sinh(far, 0.0, std::log(v_max / z), 0.0, kRelTol).value;
            return low + high;
        }

        double quadrature(double x) const {
            const double z = L * x;
            const double j = z >= kLaguerreMinZ ? laguerre_integral(z) : split_integral(z);
            return std::exp(log_pre_quad - lp * x) * j;
        }

        double pdf(double x, PdfMethod method) const {
            switch (method) {
                case PdfMethod::series:
                    return series(x);
                case PdfMethod::quadrature:
                    return quadrature(x);
                case PdfMethod::automatic:
                    break;
            }
            if (series_ok && L * x <= kSeriesMaxZ) {
                const auto t = terms(x);
                if (t.stable()) {
                    return std::exp(log_pre_series - lp * x) * (t.t1 + t.t2);
                }
            }
            return quadrature(x);
        }

        double scaled(double x) const {
            if (series_ok && L * x <= kSeriesMaxZ) {
                const double z = L * x;
                const double t1 = c1 * kummer1(z);
                const double t2 = x == 0.0 ? 0.0 : c2 * std::pow(x, 1.0 - s) * kummer2(z);
                if (x == 0.0 || Terms{t1, t2}.stable()) {
                    return std::exp(log_pre_series - lp * x) * (t1 + t2);
                }
            }
            if (x == 0.0) {
                throw DomainError("bilateral_gamma_pdf: scaled density at 0 needs the series path");
            }
            return quadrature(x) * std::pow(x, 1.0 - s);
        }

        double mass(double r) const {
            constexpr double kAbsTol = 1e-13;
            constexpr double kRelTol = 1e-12;
            if (!(r > 0.0)) {
                throw DomainError("bilateral_gamma mass: r must be positive");
            }
            if (s < 1.0 && series_ok) {
                // w = x^s removes the x^(s-1) singularity at the origin.
                auto integrand = [&](double w) { return scaled(std::pow(w, 1.0 / s)) / s; };
                return tanh_sinh(integrand, 0.0, std::pow(r, s), kAbsTol, kRelTol).value;
            }
            auto integrand = [&](double x) { return pdf(x, PdfMethod::automatic); };
            if (series_ok) {
                return tanh_sinh(integrand, 0.0, r, kAbsTol, kRelTol).value;
            }
            // s within kIntegerGuard of an integer: near s = 1 the density
            // grows like |log x| at the origin, and the mass below 1e-15 r is
            // under 1e-13 of the total.
            return tanh_sinh(integrand, 1e-15 * r, r, kAbsTol, kRelTol).value;
        }

        /// sum over x of log(1 + a p(x)), given x and log x.
        double sum_log1p(double a, std::span<const double> xs, std::span<const double> logs) const {
            if (xs.empty()) {
                return 0.0;
            }
            if (xs.size() >= kPanelMinLags) {
                if (const auto total = sum_log1p_panels(a, xs, logs)) {
                    return *total;
                }
            }
            const double z_max = L * *std::max_element(xs.begin(), xs.end());
            double total = 0.0;
            if (series_ok && z_max <= kSeriesMaxZ && terms(z_max / L).stable()) {
                // e^(-lp x) folded into the interpolants; both stay smooth on [0, z_max]
                const double decay = lp / L;
                const ChebyshevSeries cheb1([&](double z) { return std::exp(-decay * z) * m1(z); }, 0.0, z_max);
                const ChebyshevSeries cheb2([&](double z) { return std::exp(-decay * z) * m2(z); }, 0.0, z_max);
                if (cheb1.resolved() && cheb2.resolved()) {
                    const double k1 = a * std::exp(log_pre_series) * c1;
                    const double k2 = a * std::exp(log_pre_series) * c2;
                    for (std::size_t i = 0; i < xs.size(); ++i) {
                        const double z = L * xs[i];
                        const double t1 = k1 == 0.0 ? 0.0 : k1 * std::exp((s - 1.0) * logs[i]) * cheb1(z);
                        total += std::log1p(t1 + k2 * cheb2(z));
                    }
                    return total;
                }
            }
            for (double x : xs) {
                total += std::log1p(a * pdf(x, PdfMethod::automatic));
            }
            return total;
        }

        // Large lag sets: log(1 + a p(e^w)) is smooth in w = log x, so it is
        // interpolated on uniform panels in w and each lag costs one short
        // Clenshaw sum. Empty when the panels do not resolve the function.
        std::optional<double> sum_log1p_panels(double a, std::span<const double> xs,
                                               std::span<const double> logs) const {
            const auto [lo_it, hi_it] = std::minmax_element(logs.begin(), logs.end());
            const double w_lo = *lo_it;
            const double w_hi = *hi_it;
            auto f = [&](double w) { return std::log1p(a * pdf(std::exp(w), PdfMethod::automatic)); };
            for (double width = 1.0; width >= 1.0 / 64.0; width *= 0.5) {
                const auto panels = static_cast<std::size_t>(std::floor((w_hi - w_lo) / width)) + 1;
                if (panels * kPanelNodes * 4 > xs.size()) {
                    return std::nullopt;
                }
                std::vector<ChebyshevSeries> cheb;
                cheb.reserve(panels);
                bool resolved = true;
                for (std::size_t k = 0; k < panels && resolved; ++k) {
                    const double lo = w_lo + static_cast<double>(k) * width;
                    cheb.emplace_back(f, lo, lo + width, kPanelNodes, kPanelRelTol, kPanelAbsTol);
                    resolved = cheb.back().resolved();
                }
                if (!resolved) {
                    continue;
                }
                double total = 0.0;
                for (double w : logs) {
                    const auto k = std::min(static_cast<std::size_t>((w - w_lo) / width), panels - 1);
                    total += cheb[k](w);
                }
                return total;
            }
            return std::nullopt;
        }
    };

    Side positive_;
    Side negative_;
};

/// p(u; alpha1, alpha2, l1, l2) for a single argument.
inline double bilateral_gamma_pdf(const GammaKernel& k1, const GammaKernel& k2, double u,
                                  PdfMethod method = PdfMethod::automatic) {
    return BilateralGamma(k1, k2).pdf(u, method);
}

}  // namespace nbnsp
