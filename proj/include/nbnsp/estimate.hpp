// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nbnsp/ccf.hpp"
#include "nbnsp/errors.hpp"
#include "nbnsp/model.hpp"
#include "nbnsp/nelder_mead.hpp"
#include "nbnsp/pairs.hpp"
#include "nbnsp/pattern.hpp"

namespace nbnsp {

enum class IntensityWindow {
    full,           // N_i([0, T]) / T
    edge_corrected  // N_i([r, T - r]) / (T - 2r)
};

struct Intensities {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// Per-component event rates. Throws EstimationError if a component has no
/// events in the window used.
inline Intensities estimate_intensities(const PointPattern& pattern,
                                        IntensityWindow window = IntensityWindow::full,
                                        double r = 0.0) {
    const double T = pattern.horizon();
    auto rate = [&](std::span<const double> t, int which) {
        double count = static_cast<double>(t.size());
        double length = T;
        if (window == IntensityWindow::edge_corrected) {
            if (!(2.0 * r < T) || !(r >= 0.0)) {
                throw ConfigError("estimate_intensities: need 0 <= 2r < T");
            }
            const auto lo = std::lower_bound(t.begin(), t.end(), r);
            const auto hi = std::upper_bound(t.begin(), t.end(), T - r);
            count = static_cast<double>(hi - lo);
            length = T - 2.0 * r;
        }
        if (count == 0.0) {
            throw EstimationError("estimate_intensities: component " + std::to_string(which)
                                  + " has no events");
        }
        return count / length;
    };
    return {rate(pattern.times1(), 1), rate(pattern.times2(), 2)};
}

struct QmleConfig {
    KernelFamily family = KernelFamily::gamma;
    double r = 1.0;
    std::optional<ParamBox> box;         // default: ParamBox::default_for(family)
    std::optional<NbnspParams> init;     // default: moment heuristic
    NelderMeadSettings optimizer;
    double min_lag = 0.0;
    IntensityWindow intensity_window = IntensityWindow::full;

    ParamBox effective_box() const { return box.value_or(ParamBox::default_for(family)); }

    void validate() const {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw ConfigError("qmle.r must be positive");
        }
        if (!(min_lag >= 0.0) || !(min_lag < r)) {
            throw ConfigError("qmle.min_lag must satisfy 0 <= min_lag < r");
        }
        if (box && box->size() != NbnspParams::dimension(family)) {
            throw ConfigError("qmle.box has the wrong dimension for the kernel family");
        }
        if (init && init->family() != family) {
            throw ConfigError("qmle.init belongs to a different kernel family");
        }
        optimizer.validate();
    }

    void validate_for(const PointPattern& pattern) const {
        validate();
        if (!(2.0 * r < pattern.horizon())) {
            throw ConfigError("qmle.r: need 2r < T");
        }
    }
};

/// The composite quasi-log-likelihood
///
///     H(theta) = sum_{pairs} [log g(y - x) + log l1 + log l2]
///                - (T - 2r) l1 l2 int_{|u| <= r} g(u) du
///
/// over x in N1 restricted to [r, T - r], y in N2 and |y - x| <= r, with
/// l1, l2 the estimated intensities. Pair lags and intensities are computed
/// once; each evaluation only recomputes g.
class QuasiLikelihood {
  public:
    QuasiLikelihood(const PointPattern& pattern, const QmleConfig& config)
        : r_(config.r), horizon_(pattern.horizon()) {
        config.validate_for(pattern);
        intensities_ = estimate_intensities(pattern, config.intensity_window, config.r);
        lags_ = enumerate_pairs(pattern, config.r, config.min_lag);
        split_ = SignedLags(lags_);
    }

    double operator()(const NbnspParams& params) const {
        const CrossCorrelation g(params);
        const double l12 = intensities_.lambda1 * intensities_.lambda2;
        const double n = static_cast<double>(lags_.size());
        return g.log_sum(split_) + n * std::log(l12) - (horizon_ - 2.0 * r_) * l12 * g.window_integral(r_);
    }

    const std::vector<double>& lags() const noexcept { return lags_; }
    const Intensities& intensities() const noexcept { return intensities_; }
    double r() const noexcept { return r_; }
    double horizon() const noexcept { return horizon_; }

  private:
    double r_;
    double horizon_;
    Intensities intensities_;
    std::vector<double> lags_;
    SignedLags split_;
};

inline double quasi_log_likelihood(const PointPattern& pattern, const NbnspParams& params,
                                   const QmleConfig& config) {
    return QuasiLikelihood(pattern, config)(params);
}

/// Kernel estimate of the cross-correlation function on a grid of lags,
///
///     g_hat(u) = 1 / (l1 l2) sum_{x in N1 cap [r_edge, T - r_edge], y in N2}
///                k_h(y - x - u) / (T - |y - x|)
///
/// with the uniform kernel k_h(z) = 1[|z| <= h] / (2h).
inline std::vector<std::pair<double, double>> kernel_ccf(const PointPattern& pattern,
                                                         std::span<const double> grid, double h,
                                                         double r_edge) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ConfigError("kernel_ccf: bandwidth h must be positive");
    }
    const double T = pattern.horizon();
    if (!(r_edge >= 0.0) || !(2.0 * r_edge < T)) {
        throw ConfigError("kernel_ccf: need 0 <= 2 r_edge < T");
    }
    const auto [l1, l2] = estimate_intensities(pattern);
    double reach = 0.0;
    for (double u : grid) {
        if (!std::isfinite(u)) {
            throw ConfigError("kernel_ccf: grid values must be finite");
        }
        reach = std::max(reach, std::abs(u) + h);
    }

    std::vector<double> lags;
    for_each_close_pair(pattern, reach, r_edge, T - r_edge,
                        [&](double x, double y) { lags.push_back(y - x); });
    std::sort(lags.begin(), lags.end());
    // prefix[i] = sum of 1 / (T - |lag|) over the first i sorted lags
    std::vector<double> prefix(lags.size() + 1, 0.0);
    for (std::size_t i = 0; i < lags.size(); ++i) {
        prefix[i + 1] = prefix[i] + 1.0 / (T - std::abs(lags[i]));
    }

    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double u : grid) {
        const auto lo = std::lower_bound(lags.begin(), lags.end(), u - h) - lags.begin();
        const auto hi = std::upper_bound(lags.begin(), lags.end(), u + h) - lags.begin();
        const double sum = prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)];
        out.emplace_back(u, sum / (2.0 * h) / (l1 * l2));
    }
    return out;
}

}  // namespace nbnsp
