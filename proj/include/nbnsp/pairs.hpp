// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nbnsp/errors.hpp"
#include "nbnsp/pattern.hpp"

namespace nbnsp {

/// Calls visit(x, y) for every x in times1 with x_lo <= x <= x_hi and every
/// y in times2 with |y - x| <= reach, ordered by x and then y. Both windows
/// slide forward with x, so the cost is O(n1 + n2 + #pairs).
template <typename Visitor>
void for_each_close_pair(const PointPattern& pattern, double reach, double x_lo, double x_hi,
                         Visitor&& visit) {
    const auto& t1 = pattern.times1();
    const auto& t2 = pattern.times2();
    std::size_t lo = 0;
    for (double x : t1) {
        if (x < x_lo) {
            continue;
        }
        if (x > x_hi) {
            break;
        }
        while (lo < t2.size() && t2[lo] < x && std::abs(t2[lo] - x) > reach) {
            ++lo;
        }
        for (std::size_t k = lo; k < t2.size(); ++k) {
            const double y = t2[k];
            if (y > x && std::abs(y - x) > reach) {
                break;
            }
            visit(x, y);
        }
    }
}

/// Lags y - x over x in times1 restricted to [r, T - r], y in times2 and
/// min_lag < |y - x| <= r.
inline std::vector<double> enumerate_pairs(const PointPattern& pattern, double r, double min_lag = 0.0) {
    const double T = pattern.horizon();
    if (!(r > 0.0) || !(2.0 * r < T)) {
        throw ConfigError("enumerate_pairs: need 0 < 2r < T");
    }
    if (!(min_lag >= 0.0) || !(min_lag < r)) {
        throw ConfigError("enumerate_pairs: need 0 <= min_lag < r");
    }
    std::vector<double> lags;
    for_each_close_pair(pattern, r, r, T - r, [&](double x, double y) {
        const double lag = y - x;
        if (std::abs(lag) > min_lag) {
            lags.push_back(lag);
        }
    });
    return lags;
}

}  // namespace nbnsp
