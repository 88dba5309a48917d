// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "nbnsp/errors.hpp"
#include "nbnsp/estimate.hpp"
#include "nbnsp/model.hpp"
#include "nbnsp/qmle.hpp"
#include "nbnsp/rng.hpp"
#include "nbnsp/simulate.hpp"

namespace nbnsp {

/// Amplitude of g after mixing in noise: the noiseless value 1/lambda times
/// the signal fraction of each component.
inline double true_amplitude(double lambda, double sigma1, double sigma2, double noise1, double noise2) {
    if (!(lambda > 0.0) || !(sigma1 > 0.0) || !(sigma2 > 0.0) || !(noise1 >= 0.0) || !(noise2 >= 0.0)) {
        throw DomainError("true_amplitude: need lambda, sigma > 0 and noise >= 0");
    }
    const double s1 = lambda * sigma1;
    const double s2 = lambda * sigma2;
    return (s1 / (s1 + noise1)) * (s2 / (s2 + noise2)) / lambda;
}

inline double true_amplitude(const SimConfig& sim) {
    return true_amplitude(sim.parent_intensity, sim.offspring_mean1, sim.offspring_mean2, sim.noise_intensity1,
                          sim.noise_intensity2);
}

/// Parameter value the QMLE targets for data simulated from sim.
inline NbnspParams true_params(const SimConfig& sim) {
    return NbnspParams(true_amplitude(sim), sim.kernel1, sim.kernel2);
}

/// Sets both noise rates to sn_coef times the signal rates.
inline void set_sn_coefficient(SimConfig& sim, double sn_coef) {
    if (!(sn_coef >= 0.0) || !std::isfinite(sn_coef)) {
        throw ConfigError("sn_coef must be finite and nonnegative");
    }
    sim.noise_intensity1 = sn_coef * sim.signal_intensity(1);
    sim.noise_intensity2 = sn_coef * sim.signal_intensity(2);
}

struct McScenario {
    SimConfig sim;
    QmleConfig qmle;
    int replications = 500;
    std::uint64_t base_seed = 20240101;
    std::string label = "scenario";

    void validate() const {
        sim.validate();
        qmle.validate();
        if (replications < 1) {
            throw ConfigError("mc.replications must be >= 1");
        }
        if (family_of(sim.kernel1) != qmle.family) {
            throw ConfigError("qmle.kernel must match the simulated kernel family");
        }
        if (!(2.0 * qmle.r < sim.horizon)) {
            throw ConfigError("qmle.r: need 2r < sim.horizon");
        }
    }
};

struct McReport {
    std::string label;
    std::vector<std::string> names;
    std::vector<double> truth;
    std::vector<double> mean;
    std::vector<double> std;
    int replications = 0;
    int n_converged = 0;
    double wall_seconds = 0.0;
    // per replication, in seed order
    std::vector<std::vector<double>> estimates;
    std::vector<bool> converged;
};

namespace detail {

inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

}  // namespace detail

/// Worker count: requested if positive, else hardware concurrency.
inline int resolve_threads(int requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// One replication: simulate with child_seed(base_seed, k) and fit. Fits
/// that throw count as non-converged.
inline std::optional<FitResult> run_replication(const McScenario& scenario, int k) {
    const auto pattern = simulate_nbnsp(scenario.sim, child_seed(scenario.base_seed, static_cast<std::uint64_t>(k)));
    try {
        return qmle_fit(pattern, scenario.qmle);
    } catch (const EstimationError&) {
        return std::nullopt;
    } catch (const NumericalError&) {
        return std::nullopt;
    }
}

/// Runs the Monte Carlo study. Each replication depends only on its index,
/// and results are reduced in index order, so the report does not depend
/// on the number of threads. Throws EstimationError if no fit converged.
inline McReport run_scenario(const McScenario& scenario, int threads = 0) {
    scenario.validate();
    const auto start = std::chrono::steady_clock::now();
    const int n = scenario.replications;
    std::vector<std::optional<FitResult>> fits(static_cast<std::size_t>(n));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int k = next++; k < n; k = next++) {
            try {
                fits[static_cast<std::size_t>(k)] = run_replication(scenario, k);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = n;
            }
        }
    };
    const int workers = std::min(resolve_threads(threads), n);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    McReport report;
    report.label = scenario.label;
    const NbnspParams truth = true_params(scenario.sim);
    report.names = NbnspParams::names(truth.family());
    report.truth = truth.to_vector();
    report.replications = n;
    const std::size_t dim = report.truth.size();
    std::vector<std::vector<double>> columns(dim);
    for (const auto& fit : fits) {
        const bool ok = fit && fit->converged;
        report.converged.push_back(ok);
        report.estimates.push_back(fit ? fit->theta_hat.to_vector() : std::vector<double>(dim, std::nan("")));
        if (ok) {
            const auto x = fit->theta_hat.to_vector();
            for (std::size_t i = 0; i < dim; ++i) {
                columns[i].push_back(x[i]);
            }
        }
    }
    report.n_converged = static_cast<int>(columns[0].size());
    if (report.n_converged == 0) {
        throw EstimationError("run_scenario: no replication converged in '" + scenario.label + "'");
    }
    for (auto& col : columns) {
        const double m = detail::pairwise_sum(col) / static_cast<double>(col.size());
        std::vector<double> sq(col.size());
        std::transform(col.begin(), col.end(), sq.begin(), [m](double x) { return (x - m) * (x - m); });
        const double var = col.size() > 1 ? detail::pairwise_sum(sq) / static_cast<double>(col.size() - 1) : 0.0;
        report.mean.push_back(m);
        report.std.push_back(std::sqrt(var));
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace nbnsp
