// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nbnsp/errors.hpp"

namespace nbnsp {

/// Two event-time sequences observed on the window [0, horizon].
///
/// Each component is strictly increasing; identical times across the two
/// components are allowed and counted in coincident_count().
class PointPattern {
  public:
    PointPattern() = default;

    PointPattern(std::vector<double> times1, std::vector<double> times2, double horizon)
        : times1_(std::move(times1)), times2_(std::move(times2)), horizon_(horizon) {
        if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
            throw ConfigError("PointPattern: horizon must be positive and finite");
        }
        validate(times1_, 1);
        validate(times2_, 2);
        coincident_ = count_coincident();
    }

    const std::vector<double>& times1() const noexcept { return times1_; }
    const std::vector<double>& times2() const noexcept { return times2_; }
    std::span<const double> component(int i) const { return i == 1 ? times1_ : times2_; }
    double horizon() const noexcept { return horizon_; }

    /// Number of times present in both components.
    std::size_t coincident_count() const noexcept { return coincident_; }

    bool operator==(const PointPattern&) const = default;

  private:
    void validate(const std::vector<double>& t, int which) const {
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!std::isfinite(t[i]) || t[i] < 0.0 || t[i] > horizon_) {
                throw ConfigError("PointPattern: component " + std::to_string(which) + " time "
                                  + std::to_string(t[i]) + " outside [0, horizon]");
            }
            if (i > 0 && !(t[i - 1] < t[i])) {
                throw ConfigError("PointPattern: component " + std::to_string(which)
                                  + " is not strictly increasing at index " + std::to_string(i));
            }
        }
    }

    std::size_t count_coincident() const {
        std::size_t n = 0;
        std::size_t j = 0;
        for (double x : times1_) {
            while (j < times2_.size() && times2_[j] < x) {
                ++j;
            }
            if (j < times2_.size() && times2_[j] == x) {
                ++n;
            }
        }
        return n;
    }

    std::vector<double> times1_;
    std::vector<double> times2_;
    double horizon_ = 1.0;
    std::size_t coincident_ = 0;
};

}  // namespace nbnsp
