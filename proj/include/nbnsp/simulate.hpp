// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nbnsp/errors.hpp"
#include "nbnsp/model.hpp"
#include "nbnsp/pattern.hpp"
#include "nbnsp/rng.hpp"

namespace nbnsp {

/// Generative specification of a noisy bivariate Neyman-Scott process.
struct SimConfig {
    double parent_intensity = 0.1;             // lambda
    double offspring_mean1 = 2.0;              // Poisson mean of M1
    double offspring_mean2 = 4.0;              // Poisson mean of M2
    Kernel kernel1 = GammaKernel{0.3, 1.0};
    Kernel kernel2 = GammaKernel{0.4, 1.0};
    double noise_intensity1 = 0.0;
    double noise_intensity2 = 0.0;
    double horizon = 1000.0;
    std::optional<double> parent_margin;       // default: default_parent_margin()

    /// 40 mean scales of the slower kernel; parents further left than this
    /// put negligible mass into [0, horizon].
    double default_parent_margin() const {
        return 40.0 * std::max(1.0 / kernel_rate(kernel1), 1.0 / kernel_rate(kernel2));
    }

    double effective_margin() const { return parent_margin.value_or(default_parent_margin()); }

    double signal_intensity(int i) const {
        return parent_intensity * (i == 1 ? offspring_mean1 : offspring_mean2);
    }

    /// lambda sigma_i + lambda_i^B
    double intensity(int i) const {
        return signal_intensity(i) + (i == 1 ? noise_intensity1 : noise_intensity2);
    }

    void validate() const {
        auto finite_pos = [](double x) { return x > 0.0 && std::isfinite(x); };
        auto finite_nonneg = [](double x) { return x >= 0.0 && std::isfinite(x); };
        if (!finite_pos(parent_intensity)) {
            throw ConfigError("sim.parent_intensity must be positive");
        }
        if (!finite_pos(offspring_mean1) || !finite_pos(offspring_mean2)) {
            throw ConfigError("sim.offspring_mean1/2 must be positive");
        }
        if (!finite_nonneg(noise_intensity1) || !finite_nonneg(noise_intensity2)) {
            throw ConfigError("sim.noise_intensity1/2 must be nonnegative");
        }
        if (!finite_pos(horizon)) {
            throw ConfigError("sim.horizon must be positive");
        }
        if (parent_margin && !finite_nonneg(*parent_margin)) {
            throw ConfigError("sim.parent_margin must be nonnegative");
        }
        if (kernel1.index() != kernel2.index()) {
            throw ConfigError("sim: both kernels must belong to the same family");
        }
    }
};

inline double sample_kernel(SplitMix64& rng, const Kernel& k) {
    if (const auto* g = std::get_if<GammaKernel>(&k)) {
        return sample_gamma(rng, g->shape) / g->rate;
    }
    return sample_exponential(rng, std::get<ExpKernel>(k).rate);
}

namespace detail {

inline std::vector<double> poisson_on(SplitMix64& rng, double intensity, double start, double end) {
    const double length = end - start;
    const std::uint64_t n = sample_poisson(rng, intensity * length);
    std::vector<double> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        out.push_back(start + length * rng.uniform());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Exactly repeated values cannot occur in a simple point process; they only
// arise when a displacement underflows next to its parent.
inline void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

enum StreamTag : std::uint64_t { kParents = 1, kOffspring = 2, kNoise1 = 3, kNoise2 = 4 };

}  // namespace detail

/// Homogeneous Poisson process on [0, horizon], sorted.
inline std::vector<double> simulate_poisson(double intensity, double horizon, std::uint64_t seed) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("simulate_poisson: horizon must be positive");
    }
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
        throw ConfigError("simulate_poisson: intensity must be nonnegative");
    }
    SplitMix64 rng(seed);
    auto out = detail::poisson_on(rng, intensity, 0.0, horizon);
    detail::sort_unique(out);
    return out;
}

/// One realization of the noisy bivariate Neyman-Scott process on
/// [0, horizon]. Parents, offspring and each noise component draw from their
/// own child stream of seed.
inline PointPattern simulate_nbnsp(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    const double T = config.horizon;

    SplitMix64 parent_rng(child_seed(seed, detail::kParents));
    const auto parents =
        detail::poisson_on(parent_rng, config.parent_intensity, -config.effective_margin(), T);

    std::vector<double> times1;
    std::vector<double> times2;
    SplitMix64 offspring_rng(child_seed(seed, detail::kOffspring));
    auto spawn = [&](double c, double mean, const Kernel& k, std::vector<double>& out) {
        const std::uint64_t m = sample_poisson(offspring_rng, mean);
        for (std::uint64_t j = 0; j < m; ++j) {
            const double t = c + sample_kernel(offspring_rng, k);
            if (t >= 0.0 && t <= T) {
                out.push_back(t);
            }
        }
    };
    for (double c : parents) {
        spawn(c, config.offspring_mean1, config.kernel1, times1);
        spawn(c, config.offspring_mean2, config.kernel2, times2);
    }

    SplitMix64 noise1_rng(child_seed(seed, detail::kNoise1));
    SplitMix64 noise2_rng(child_seed(seed, detail::kNoise2));
    const auto noise1 = detail::poisson_on(noise1_rng, config.noise_intensity1, 0.0, T);
    const auto noise2 = detail::poisson_on(noise2_rng, config.noise_intensity2, 0.0, T);
    times1.insert(times1.end(), noise1.begin(), noise1.end());
    times2.insert(times2.end(), noise2.begin(), noise2.end());

    detail::sort_unique(times1);
    detail::sort_unique(times2);
    return PointPattern(std::move(times1), std::move(times2), T);
}

}  // namespace nbnsp
