// SPDX-License-Identifier: Apache-2.0
// nbnsp: simulate, fit and inspect noisy bivariate Neyman-Scott processes.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbnsp/ccf.hpp"
#include "nbnsp/errors.hpp"
#include "nbnsp/estimate.hpp"
#include "nbnsp/experiments.hpp"
#include "nbnsp/io.hpp"
#include "nbnsp/qmle.hpp"
#include "nbnsp/simulate.hpp"

namespace {

using namespace nbnsp;
using io::json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<double> opt(double v) { return std::isnan(v) ? std::nullopt : std::optional<double>(v); }

int thread_count(int flag) {
    if (flag > 0) {
        return flag;
    }
    if (const char* env = std::getenv("NBNSP_THREADS")) {
        const auto v = io::parse_double(env);
        if (!v || *v < 1 || *v != std::floor(*v)) {
            throw UsageError("NBNSP_THREADS must be a positive integer");
        }
        return static_cast<int>(*v);
    }
    return resolve_threads(0);
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw ParseError("cannot write " + out_path);
    }
    out << text;
}

NbnspParams read_theta(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    // a fit report carries the parameters under "theta"
    if (doc.is_object() && doc.contains("theta") && doc.contains("converged")) {
        return io::params_from_json(doc["theta"], path);
    }
    return io::params_from_json(doc, path);
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> parts;
    std::size_t start = 0;
    for (;;) {
        const auto colon = spec.find(':', start);
        const auto v = io::parse_double(spec.substr(start, colon - start));
        if (!v || !std::isfinite(*v)) {
            throw UsageError("--grid expects min:max:step, got " + spec);
        }
        parts.push_back(*v);
        if (colon == std::string::npos) {
            break;
        }
        start = colon + 1;
    }
    if (parts.size() != 3) {
        throw UsageError("--grid expects min:max:step, got " + spec);
    }
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0.0)) {
        throw UsageError("--grid step must be positive");
    }
    if (!(hi >= lo)) {
        throw UsageError("--grid needs max >= min");
    }
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (n > 10'000'000) {
        throw UsageError("--grid has too many points");
    }
    std::vector<double> grid;
    for (long i = 0; i < n; ++i) {
        grid.push_back(lo + static_cast<double>(i) * step);
    }
    return grid;
}

QmleConfig qmle_from(const std::string& config_path, const std::string& kernel, double r) {
    QmleConfig q = config_path.empty() ? QmleConfig{} : io::read_run_config(config_path).qmle;
    if (!kernel.empty()) {
        if (kernel != "gamma" && kernel != "exp") {
            throw UsageError("--kernel must be gamma or exp");
        }
        const auto f = kernel == "gamma" ? KernelFamily::gamma : KernelFamily::exponential;
        if (f != q.family) {
            q.family = f;
            q.box.reset();
            q.init.reset();
        }
    }
    if (!std::isnan(r)) {
        q.r = r;
    }
    q.validate();
    return q;
}

int cmd_simulate(const std::string& config, std::uint64_t seed, bool have_seed, const std::string& out) {
    const auto rc = io::read_run_config(config);
    const auto pattern = simulate_nbnsp(rc.sim, have_seed ? seed : rc.base_seed);
    if (out.empty()) {
        io::write_pattern_csv(std::cout, pattern);
    } else {
        io::write_pattern(out, pattern);
    }
    auto& log = out.empty() ? std::cerr : std::cout;
    const double T = pattern.horizon();
    log << "horizon " << io::format_double(T) << "\n";
    for (int c = 1; c <= 2; ++c) {
        const auto n = pattern.component(c).size();
        log << "component " << c << ": " << n << " events, rate " << static_cast<double>(n) / T
            << " (expected " << rc.sim.intensity(c) << ")\n";
    }
    return kOk;
}

int cmd_fit(const std::string& pattern_path, double horizon, const std::string& config, const std::string& kernel,
            double r, const std::string& out) {
    const auto pattern = io::read_pattern(pattern_path, opt(horizon));
    const auto q = qmle_from(config, kernel, r);
    const auto fit = qmle_fit(pattern, q);
    emit(out, io::fit_to_json(fit).dump(2) + "\n");
    if (!fit.converged) {
        std::cerr << "warning: fit did not converge (score norm " << fit.grad_norm_fd << ")\n";
        return kNumerical;
    }
    return kOk;
}

int cmd_ccf(const std::string& pattern_path, double horizon, double h, const std::string& grid_spec, double r_edge,
            const std::string& theta_path, const std::string& out) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw UsageError("--h must be positive");
    }
    if (!(r_edge >= 0.0)) {
        throw UsageError("--r-edge must be nonnegative");
    }
    const auto grid = parse_grid(grid_spec);
    const auto pattern = io::read_pattern(pattern_path, opt(horizon));
    const auto est = kernel_ccf(pattern, grid, h, r_edge);
    std::optional<CrossCorrelation> theory;
    if (!theta_path.empty()) {
        theory.emplace(read_theta(theta_path));
    }
    std::string text = theory ? "u,g_hat,g_theta\n" : "u,g_hat\n";
    for (const auto& [u, g] : est) {
        text += io::format_double(u) + "," + io::format_double(g);
        if (theory) {
            text += ",";
            if (u != 0.0) {
                text += io::format_double((*theory)(u));
            }
        }
        text += "\n";
    }
    emit(out, text);
    return kOk;
}

int cmd_mc(const std::string& config, const std::string& out_dir, int threads, int replications) {
    auto rc = io::read_run_config(config);
    if (replications > 0) {
        rc.replications = replications;
    }
    const int workers = thread_count(threads);
    for (const auto& scenario : rc.scenarios()) {
        const auto report = run_scenario(scenario, workers);
        if (!out_dir.empty()) {
            io::write_report(out_dir, report);
        }
        std::cout << io::format_report_table(report) << std::flush;
    }
    return kOk;
}

int cmd_prep(const std::vector<std::string>& inputs, double horizon, double gap, const std::string& out) {
    std::vector<PointPattern> sessions;
    for (const auto& path : inputs) {
        sessions.push_back(io::read_pattern(path, opt(horizon)));
    }
    const auto merged = io::concat_sessions(sessions, gap);
    io::write_pattern(out, merged);
    std::cout << "merged " << sessions.size() << " sessions, horizon " << io::format_double(merged.horizon())
              << ", events " << merged.times1().size() << " / " << merged.times2().size() << "\n";
    return kOk;
}

int cmd_loglik(const std::string& pattern_path, double horizon, const std::string& theta_path,
               const std::string& config, double r) {
    const auto pattern = io::read_pattern(pattern_path, opt(horizon));
    const auto theta = read_theta(theta_path);
    auto q = qmle_from(config, to_string(theta.family()), r);
    const QuasiLikelihood h(pattern, q);
    json j;
    j["objective"] = h(theta);
    j["n_pairs"] = h.lags().size();
    j["lambda_hat"] = {h.intensities().lambda1, h.intensities().lambda2};
    std::cout << j.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and quasi-likelihood estimation for noisy bivariate Neyman-Scott processes"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads for mc (default: NBNSP_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    std::string config, out, pattern, kernel, theta, grid = "-1:1:0.01", out_dir;
    double horizon = std::nan(""), r = std::nan(""), h = 0.001, r_edge = 1.0, gap = 2.0;
    std::uint64_t seed = 0;
    int replications = 0;
    std::vector<std::string> inputs;

    auto* sim = app.add_subcommand("simulate", "simulate a pattern from a run config");
    sim->add_option("config", config, "RunConfig JSON")->required();
    auto* seed_opt = sim->add_option("--seed", seed, "RNG seed (default: mc.base_seed)");
    sim->add_option("--out", out, "pattern CSV; a .json horizon sidecar is written next to it");

    auto* fit = app.add_subcommand("fit", "quasi-maximum likelihood fit");
    fit->add_option("pattern", pattern, "pattern CSV")->required();
    fit->add_option("--config", config, "RunConfig JSON (qmle section is used)");
    fit->add_option("--kernel", kernel, "gamma or exp")->check(CLI::IsMember({"gamma", "exp"}));
    fit->add_option("--r", r, "lag window (default 1.0)");
    fit->add_option("--horizon", horizon, "observation horizon (default: sidecar)");
    fit->add_option("--out", out, "FitResult JSON (default: stdout)");

    auto* ccf = app.add_subcommand("ccf", "kernel estimate of the cross-correlation function");
    // --h is the bandwidth here, so help is long-form only
    ccf->set_help_flag("--help", "Print this help message and exit");
    ccf->add_option("pattern", pattern, "pattern CSV")->required();
    ccf->add_option("--h", h, "bandwidth (default 0.001)");
    ccf->add_option("--grid", grid, "min:max:step (default -1:1:0.01)");
    ccf->add_option("--r-edge", r_edge, "reference events restricted to [r, T - r] (default 1.0)");
    ccf->add_option("--theta", theta, "parameter JSON for a theoretical g column");
    ccf->add_option("--horizon", horizon, "observation horizon (default: sidecar)");
    ccf->add_option("--out", out, "CSV output (default: stdout)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo study from a run config");
    mc->add_option("config", config, "RunConfig JSON")->required();
    mc->add_option("--out-dir", out_dir, "directory for <label>.csv and <label>.json");
    mc->add_option("--replications", replications, "override mc.replications")->check(CLI::PositiveNumber);

    auto* prep = app.add_subcommand("prep", "concatenate per-session pattern files");
    prep->add_option("inputs", inputs, "session CSVs in time order")->required();
    prep->add_option("--concat-gap", gap, "seconds inserted between sessions (default 2)");
    prep->add_option("--horizon", horizon, "horizon of every session (default: sidecars)");
    prep->add_option("--out", out, "merged pattern CSV")->required();

    auto* loglik = app.add_subcommand("loglik", "evaluate the quasi-log-likelihood once");
    loglik->add_option("pattern", pattern, "pattern CSV")->required();
    loglik->add_option("--theta", theta, "parameter JSON")->required();
    loglik->add_option("--config", config, "RunConfig JSON (qmle section is used)");
    loglik->add_option("--r", r, "lag window (default 1.0)");
    loglik->add_option("--horizon", horizon, "observation horizon (default: sidecar)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*sim) {
            return cmd_simulate(config, seed, seed_opt->count() > 0, out);
        }
        if (*fit) {
            return cmd_fit(pattern, horizon, config, kernel, r, out);
        }
        if (*ccf) {
            return cmd_ccf(pattern, horizon, h, grid, r_edge, theta, out);
        }
        if (*mc) {
            return cmd_mc(config, out_dir, threads, replications);
        }
        if (*prep) {
            return cmd_prep(inputs, horizon, gap, out);
        }
        if (*loglik) {
            return cmd_loglik(pattern, horizon, theta, config, r);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kData;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kData;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kData;
    } catch (const EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return kNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
