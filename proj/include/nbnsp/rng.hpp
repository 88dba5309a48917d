// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "nbnsp/special_functions.hpp"

namespace nbnsp {

/// SplitMix64 finalizer; a bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed of the k-th child stream of base. Children of distinct (base, k)
/// pairs are unrelated, so replications can be scheduled in any order.
constexpr std::uint64_t child_seed(std::uint64_t base, std::uint64_t k) noexcept {
    return mix64(mix64(base ^ 0x6a09e667f3bcc909ull) + (k + 1) * 0x9e3779b97f4a7c15ull);
}

/// Splittable 64-bit generator (Steele, Lea & Flood). The whole state is
/// one counter, so a stream is reproduced exactly from its seed on every
/// platform.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return mix64(state_ += 0x9e3779b97f4a7c15ull); }

    /// Independent generator derived from this one's next output.
    SplitMix64 split() noexcept { return SplitMix64(mix64((*this)() ^ 0xbb67ae8584caa73bull)); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
    }

  private:
    std::uint64_t state_;
};

// Samplers below only use elementary functions so streams stay
// bit-reproducible; std:: distributions are implementation-defined.

inline double sample_exponential(SplitMix64& rng, double rate) {
    return -std::log(rng.uniform_open()) / rate;
}

/// Standard normal by the Marsaglia polar method.
inline double sample_normal(SplitMix64& rng) {
    for (;;) {
        const double u = 2.0 * rng.uniform() - 1.0;
        const double v = 2.0 * rng.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

/// Gamma(shape, 1) by Marsaglia & Tsang; shape < 1 boosted through
/// Gamma(shape + 1) * U^(1/shape), done in log space so tiny values keep
/// their precision.
inline double sample_gamma(SplitMix64& rng, double shape) {
    if (shape < 1.0) {
        const double g = sample_gamma(rng, shape + 1.0);
        return std::exp(std::log(g) + std::log(rng.uniform_open()) / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = sample_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

/// Poisson(mean): multiplication method below 10, Hormann's PTRS
/// transformed rejection above.
inline std::uint64_t sample_poisson(SplitMix64& rng, double mean) {
    if (!(mean > 0.0)) {
        return 0;
    }
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = rng.uniform_open();
        while (prod > limit) {
            ++k;
            prod *= rng.uniform_open();
        }
        return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform_open();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = -mean + k * loglam - log_gamma(k + 1.0);
        if (lhs <= rhs) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

}  // namespace nbnsp
