// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nbnsp/errors.hpp"
#include "nbnsp/special_functions.hpp"

namespace nbnsp {

/// Gamma dispersal kernel with density rate^shape / Gamma(shape) u^(shape-1) e^(-rate u).
struct GammaKernel {
    double shape = 1.0;
    double rate = 1.0;

    GammaKernel() = default;
    GammaKernel(double shape_, double rate_) : shape(shape_), rate(rate_) {
        if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
            throw ConfigError("GammaKernel: shape and rate must be positive and finite");
        }
    }
    double mean() const noexcept { return shape / rate; }
    bool operator==(const GammaKernel&) const = default;
};

/// Exponential dispersal kernel rate e^(-rate u).
struct ExpKernel {
    double rate = 1.0;

    ExpKernel() = default;
    explicit ExpKernel(double rate_) : rate(rate_) {
        if (!(rate > 0.0) || !std::isfinite(rate)) {
            throw ConfigError("ExpKernel: rate must be positive and finite");
        }
    }
    double mean() const noexcept { return 1.0 / rate; }
    bool operator==(const ExpKernel&) const = default;
};

using Kernel = std::variant<GammaKernel, ExpKernel>;

enum class KernelFamily { gamma, exponential };

inline KernelFamily family_of(const Kernel& k) {
    return std::holds_alternative<GammaKernel>(k) ? KernelFamily::gamma : KernelFamily::exponential;
}

inline std::string to_string(KernelFamily f) { return f == KernelFamily::gamma ? "gamma" : "exp"; }

inline double kernel_rate(const Kernel& k) {
    return std::visit([](const auto& kk) { return kk.rate; }, k);
}

inline double kernel_mean(const Kernel& k) {
    return std::visit([](const auto& kk) { return kk.mean(); }, k);
}

/// Dispersal density at u. Zero for u < 0; at u = 0 the gamma density is
/// infinite for shape < 1 and that case throws DomainError.
inline double kernel_pdf(const GammaKernel& k, double u) {
    if (!std::isfinite(u)) {
        throw DomainError("kernel_pdf: u must be finite");
    }
    if (u < 0.0) {
        return 0.0;
    }
    if (u == 0.0) {
        if (k.shape < 1.0) {
            throw DomainError("kernel_pdf: gamma density is infinite at u = 0 for shape < 1");
        }
        return k.shape == 1.0 ? k.rate : 0.0;
    }
    return std::exp(k.shape * std::log(k.rate) - log_gamma(k.shape) + (k.shape - 1.0) * std::log(u)
                    - k.rate * u);
}

inline double kernel_pdf(const ExpKernel& k, double u) {
    if (!std::isfinite(u)) {
        throw DomainError("kernel_pdf: u must be finite");
    }
    return u < 0.0 ? 0.0 : k.rate * std::exp(-k.rate * u);
}

inline double kernel_pdf(const Kernel& k, double u) {
    return std::visit([u](const auto& kk) { return kernel_pdf(kk, u); }, k);
}

/// The estimable parameter vector: amplitude a and the two dispersal kernels.
///
/// Flattened coordinates are (a, shape1, shape2, rate1, rate2) for the gamma
/// family and (a, rate1, rate2) for the exponential family.
struct NbnspParams {
    double a = 0.0;
    Kernel kernel1 = GammaKernel{};
    Kernel kernel2 = GammaKernel{};

    NbnspParams() = default;
    NbnspParams(double a_, Kernel k1, Kernel k2) : a(a_), kernel1(k1), kernel2(k2) {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw ConfigError("NbnspParams: amplitude must be finite and nonnegative");
        }
        if (kernel1.index() != kernel2.index()) {
            throw ConfigError("NbnspParams: both kernels must belong to the same family");
        }
    }

    KernelFamily family() const { return family_of(kernel1); }

    static std::size_t dimension(KernelFamily f) { return f == KernelFamily::gamma ? 5 : 3; }
    std::size_t dimension() const { return dimension(family()); }

    std::vector<double> to_vector() const {
        if (family() == KernelFamily::gamma) {
            const auto& k1 = std::get<GammaKernel>(kernel1);
            const auto& k2 = std::get<GammaKernel>(kernel2);
            return {a, k1.shape, k2.shape, k1.rate, k2.rate};
        }
        return {a, std::get<ExpKernel>(kernel1).rate, std::get<ExpKernel>(kernel2).rate};
    }

    static NbnspParams from_vector(KernelFamily f, std::span<const double> x) {
        if (x.size() != dimension(f)) {
            throw ConfigError("NbnspParams: wrong number of coordinates");
        }
        if (f == KernelFamily::gamma) {
            return {x[0], GammaKernel{x[1], x[3]}, GammaKernel{x[2], x[4]}};
        }
        return {x[0], ExpKernel{x[1]}, ExpKernel{x[2]}};
    }

    static std::vector<std::string> names(KernelFamily f) {
        if (f == KernelFamily::gamma) {
            return {"a", "alpha1", "alpha2", "l1", "l2"};
        }
        return {"a", "l1", "l2"};
    }

    bool operator==(const NbnspParams&) const = default;
};

/// Rectangular parameter domain, one open interval per flattened coordinate.
class ParamBox {
  public:
    ParamBox() = default;
    ParamBox(std::vector<double> lower, std::vector<double> upper)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.size() != upper_.size() || lower_.empty()) {
            throw ConfigError("ParamBox: lower and upper must have the same nonzero length");
        }
        for (std::size_t i = 0; i < lower_.size(); ++i) {
            if (!(lower_[i] > 0.0) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
                throw ConfigError("ParamBox: bounds must satisfy 0 < lower < upper < inf");
            }
        }
    }

    /// Default search box used when no box is configured.
    static ParamBox default_for(KernelFamily f) {
        if (f == KernelFamily::gamma) {
            return {{1e-4, 0.02, 0.02, 1e-2, 1e-2}, {1e4, 20.0, 20.0, 1e2, 1e2}};
        }
        return {{1e-4, 1e-2, 1e-2}, {1e4, 1e2, 1e2}};
    }

    std::size_t size() const noexcept { return lower_.size(); }
    const std::vector<double>& lower() const noexcept { return lower_; }
    const std::vector<double>& upper() const noexcept { return upper_; }

    bool contains(std::span<const double> x) const {
        if (x.size() != size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < lower_[i] || x[i] > upper_[i]) {
                return false;
            }
        }
        return true;
    }

    /// Geometric midpoint of each interval.
    std::vector<double> midpoint() const {
        std::vector<double> m(size());
        for (std::size_t i = 0; i < size(); ++i) {
            m[i] = std::sqrt(lower_[i] * upper_[i]);
        }
        return m;
    }

  private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

}  // namespace nbnsp
