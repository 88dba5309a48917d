// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "nbnsp/errors.hpp"
#include "nbnsp/estimate.hpp"
#include "nbnsp/experiments.hpp"
#include "nbnsp/model.hpp"
#include "nbnsp/pattern.hpp"
#include "nbnsp/qmle.hpp"
#include "nbnsp/simulate.hpp"

namespace nbnsp::io {

using json = nlohmann::json;

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return x;
}

// ---------------------------------------------------------------- patterns

/// Sidecar next to a pattern CSV: same stem, extension .json.
inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".json");
    return p;
}

inline double read_horizon_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open horizon sidecar " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("horizon") || !doc["horizon"].is_number()) {
        throw ParseError(path.string() + ": expected {\"horizon\": <number>}");
    }
    return doc["horizon"].get<double>();
}

/// Parses `component,time` CSV text. Rows may come in any order; each
/// component is sorted. Errors name the 1-based line number.
inline PointPattern parse_pattern_csv(std::istream& in, double horizon, const std::string& source = "pattern") {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ParseError(source + ": horizon must be positive and finite");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source + ": line 1: missing header `component,time`");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "component,time") {
        throw ParseError(source + ": line 1: header must be `component,time`, got `" + line + "`");
    }
    std::vector<double> t1, t2;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto where = source + ": line " + std::to_string(lineno) + ": ";
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(where + "expected two fields `component,time`");
        }
        const std::string_view comp = std::string_view(line).substr(0, comma);
        const auto time = parse_double(std::string_view(line).substr(comma + 1));
        if (!time || !std::isfinite(*time) || *time < 0.0) {
            throw ParseError(where + "time must be a finite nonnegative decimal");
        }
        if (*time > horizon) {
            throw ParseError(where + "time " + format_double(*time) + " exceeds horizon "
                             + format_double(horizon));
        }
        if (comp == "1") {
            t1.push_back(*time);
        } else if (comp == "2") {
            t2.push_back(*time);
        } else {
            throw ParseError(where + "component must be 1 or 2");
        }
    }
    for (auto* t : {&t1, &t2}) {
        std::sort(t->begin(), t->end());
        if (std::adjacent_find(t->begin(), t->end()) != t->end()) {
            throw ParseError(source + ": component " + (t == &t1 ? "1" : "2") + " has repeated times");
        }
    }
    return PointPattern(std::move(t1), std::move(t2), horizon);
}

/// Reads a pattern; the horizon comes from the argument or, failing that,
/// from the sidecar file.
inline PointPattern read_pattern(const std::filesystem::path& path, std::optional<double> horizon = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open pattern file " + path.string());
    }
    const double T = horizon ? *horizon : read_horizon_sidecar(sidecar_path(path));
    return parse_pattern_csv(in, T, path.string());
}

inline void write_pattern_csv(std::ostream& out, const PointPattern& pattern) {
    out << "component,time\n";
    for (int c = 1; c <= 2; ++c) {
        for (double t : pattern.component(c)) {
            out << c << ',' << format_double(t) << '\n';
        }
    }
}

/// Writes the CSV and its horizon sidecar.
inline void write_pattern(const std::filesystem::path& path, const PointPattern& pattern) {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot write " + path.string());
    }
    write_pattern_csv(out, pattern);
    std::ofstream side(sidecar_path(path));
    if (!side) {
        throw ParseError("cannot write " + sidecar_path(path).string());
    }
    side << "{\"horizon\": " << format_double(pattern.horizon()) << "}\n";
}

/// Joins sessions end to end, each shifted past the previous horizon plus
/// gap seconds.
inline PointPattern concat_sessions(const std::vector<PointPattern>& sessions, double gap) {
    if (sessions.empty()) {
        throw ConfigError("concat_sessions: no input sessions");
    }
    if (!(gap >= 0.0) || !std::isfinite(gap)) {
        throw ConfigError("concat_sessions: gap must be finite and nonnegative");
    }
    std::vector<double> t1, t2;
    double offset = 0.0;
    for (std::size_t k = 0; k < sessions.size(); ++k) {
        if (k > 0) {
            offset += gap;
        }
        for (double t : sessions[k].times1()) {
            t1.push_back(offset + t);
        }
        for (double t : sessions[k].times2()) {
            t2.push_back(offset + t);
        }
        offset += sessions[k].horizon();
    }
    // a session's last event at its horizon can meet the next one's first at 0
    t1.erase(std::unique(t1.begin(), t1.end()), t1.end());
    t2.erase(std::unique(t2.begin(), t2.end()), t2.end());
    return PointPattern(std::move(t1), std::move(t2), offset);
}

// ------------------------------------------------------------------ config

namespace detail {

inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }
}

inline double get_number(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + "." + key + ": expected a number");
    }
    return v.get<double>();
}

template <typename T>
void read_number(const json& obj, const std::string& key, const std::string& where, T& out) {
    if (!obj.contains(key)) {
        return;
    }
    const double v = get_number(obj, key, where);
    if constexpr (std::is_integral_v<T>) {
        if (v != std::floor(v) || std::abs(v) > 9.0e15) {
            throw ConfigError(where + "." + key + ": expected an integer");
        }
        out = static_cast<T>(v);
    } else {
        out = v;
    }
}

inline std::vector<double> get_vector(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_array()) {
        throw ConfigError(where + "." + key + ": expected an array of numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            throw ConfigError(where + "." + key + ": expected an array of numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

inline KernelFamily parse_family(const json& v, const std::string& where) {
    if (v == "gamma") {
        return KernelFamily::gamma;
    }
    if (v == "exp") {
        return KernelFamily::exponential;
    }
    throw ConfigError(where + ": kernel must be \"gamma\" or \"exp\"");
}

}  // namespace detail

/// Parameter value as {"kernel", "a", "alpha1", "alpha2", "l1", "l2"}
/// (alphas omitted for "exp").
inline json params_to_json(const NbnspParams& p) {
    json j;
    j["kernel"] = to_string(p.family());
    const auto names = NbnspParams::names(p.family());
    const auto x = p.to_vector();
    for (std::size_t i = 0; i < x.size(); ++i) {
        j[names[i]] = x[i];
    }
    return j;
}

inline NbnspParams params_from_json(const json& j, const std::string& where = "theta") {
    if (!j.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    const KernelFamily f = j.contains("kernel") ? detail::parse_family(j["kernel"], where + ".kernel")
                                                : KernelFamily::gamma;
    if (f == KernelFamily::gamma) {
        detail::check_keys(j, {"kernel", "a", "alpha1", "alpha2", "l1", "l2"}, where);
    } else {
        detail::check_keys(j, {"kernel", "a", "l1", "l2"}, where);
    }
    std::vector<double> x;
    for (const auto& name : NbnspParams::names(f)) {
        if (!j.contains(name)) {
            throw ConfigError(where + ": missing \"" + name + "\"");
        }
        x.push_back(detail::get_number(j, name, where));
    }
    try {
        return NbnspParams::from_vector(f, x);
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

/// How one config expands into several scenarios (one table row each).
struct Sweep {
    std::string parameter;  // "horizon", "r" or "sn_coef"
    std::vector<double> values;
};

struct RunConfig {
    std::string label = "run";
    SimConfig sim;
    QmleConfig qmle;
    int replications = 500;
    std::uint64_t base_seed = 20240101;
    std::optional<Sweep> sweep;

    /// One scenario per sweep value, or a single one.
    std::vector<McScenario> scenarios() const {
        auto base = [&] {
            McScenario s;
            s.sim = sim;
            s.qmle = qmle;
            s.replications = replications;
            s.base_seed = base_seed;
            s.label = label;
            return s;
        };
        if (!sweep) {
            return {base()};
        }
        std::vector<McScenario> out;
        for (double v : sweep->values) {
            McScenario s = base();
            if (sweep->parameter == "horizon") {
                s.sim.horizon = v;
            } else if (sweep->parameter == "r") {
                s.qmle.r = v;
            } else {
                set_sn_coefficient(s.sim, v);
            }
            s.label = label + "_" + sweep->parameter + "=" + format_double(v);
            s.validate();
            out.push_back(std::move(s));
        }
        return out;
    }
};

namespace detail {

inline SimConfig parse_sim(const json& j) {
    const std::string w = "sim";
    check_keys(j,
               {"parent_intensity", "offspring_mean1", "offspring_mean2", "kernel", "shape1", "shape2", "rate1",
                "rate2", "noise_intensity1", "noise_intensity2", "sn_coef", "horizon", "parent_margin"},
               w);
    SimConfig s;
    read_number(j, "parent_intensity", w, s.parent_intensity);
    read_number(j, "offspring_mean1", w, s.offspring_mean1);
    read_number(j, "offspring_mean2", w, s.offspring_mean2);
    read_number(j, "horizon", w, s.horizon);
    const KernelFamily f = j.contains("kernel") ? parse_family(j["kernel"], w + ".kernel") : KernelFamily::gamma;
    double shape1 = 0.3, shape2 = 0.4, rate1 = 1.0, rate2 = 1.0;
    read_number(j, "rate1", w, rate1);
    read_number(j, "rate2", w, rate2);
    try {
        if (f == KernelFamily::gamma) {
            read_number(j, "shape1", w, shape1);
            read_number(j, "shape2", w, shape2);
            s.kernel1 = GammaKernel{shape1, rate1};
            s.kernel2 = GammaKernel{shape2, rate2};
        } else {
            if (j.contains("shape1") || j.contains("shape2")) {
                throw ConfigError("sim: shape1/shape2 do not apply to the exp kernel");
            }
            s.kernel1 = ExpKernel{rate1};
            s.kernel2 = ExpKernel{rate2};
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("sim: ") + e.what());
    }
    if (j.contains("parent_margin")) {
        s.parent_margin = get_number(j, "parent_margin", w);
    }
    const bool explicit_noise = j.contains("noise_intensity1") || j.contains("noise_intensity2");
    if (j.contains("sn_coef")) {
        if (explicit_noise) {
            throw ConfigError("sim: give either sn_coef or noise_intensity1/2, not both");
        }
        set_sn_coefficient(s, get_number(j, "sn_coef", w));
    } else {
        read_number(j, "noise_intensity1", w, s.noise_intensity1);
        read_number(j, "noise_intensity2", w, s.noise_intensity2);
    }
    s.validate();
    return s;
}

inline QmleConfig parse_qmle(const json& j) {
    const std::string w = "qmle";
    check_keys(j, {"kernel", "r", "min_lag", "intensity_window", "box", "init", "optimizer"}, w);
    QmleConfig q;
    if (j.contains("kernel")) {
        q.family = parse_family(j["kernel"], w + ".kernel");
    }
    read_number(j, "r", w, q.r);
    read_number(j, "min_lag", w, q.min_lag);
    if (j.contains("intensity_window")) {
        const auto& v = j["intensity_window"];
        if (v == "full") {
            q.intensity_window = IntensityWindow::full;
        } else if (v == "edge_corrected") {
            q.intensity_window = IntensityWindow::edge_corrected;
        } else {
            throw ConfigError("qmle.intensity_window must be \"full\" or \"edge_corrected\"");
        }
    }
    if (j.contains("box")) {
        check_keys(j["box"], {"lower", "upper"}, "qmle.box");
        q.box = ParamBox(get_vector(j["box"], "lower", "qmle.box"), get_vector(j["box"], "upper", "qmle.box"));
    }
    if (j.contains("init")) {
        q.init = params_from_json(j["init"], "qmle.init");
    }
    if (j.contains("optimizer")) {
        const auto& o = j["optimizer"];
        const std::string wo = "qmle.optimizer";
        check_keys(o, {"max_iters", "f_tol", "x_tol", "init_step", "restarts"}, wo);
        read_number(o, "max_iters", wo, q.optimizer.max_iters);
        read_number(o, "f_tol", wo, q.optimizer.f_tol);
        read_number(o, "x_tol", wo, q.optimizer.x_tol);
        read_number(o, "init_step", wo, q.optimizer.init_step);
        read_number(o, "restarts", wo, q.optimizer.restarts);
    }
    q.validate();
    return q;
}

}  // namespace detail

/// Parses and validates a RunConfig document. Every object rejects keys it
/// does not know; 2r < T is checked against sim.horizon and every swept
/// horizon or r.
inline RunConfig parse_run_config(const json& doc) {
    RunConfig c;
    try {
        detail::check_keys(doc, {"label", "sim", "qmle", "mc"}, "config");
        if (doc.contains("label")) {
            if (!doc["label"].is_string()) {
                throw ConfigError("config.label: expected a string");
            }
            c.label = doc["label"].get<std::string>();
        }
        if (doc.contains("sim")) {
            c.sim = detail::parse_sim(doc["sim"]);
        }
        if (doc.contains("qmle")) {
            c.qmle = detail::parse_qmle(doc["qmle"]);
        }
        if (doc.contains("mc")) {
            const auto& m = doc["mc"];
            detail::check_keys(m, {"replications", "base_seed", "sweep"}, "mc");
            detail::read_number(m, "replications", "mc", c.replications);
            if (m.contains("base_seed")) {
                if (!m["base_seed"].is_number_unsigned()) {
                    throw ConfigError("mc.base_seed: expected a nonnegative integer");
                }
                c.base_seed = m["base_seed"].get<std::uint64_t>();
            }
            if (m.contains("sweep")) {
                const auto& s = m["sweep"];
                detail::check_keys(s, {"parameter", "values"}, "mc.sweep");
                if (!s.contains("parameter") || !s["parameter"].is_string()) {
                    throw ConfigError("mc.sweep.parameter: expected \"horizon\", \"r\" or \"sn_coef\"");
                }
                Sweep sw{s["parameter"].get<std::string>(), detail::get_vector(s, "values", "mc.sweep")};
                if (sw.parameter != "horizon" && sw.parameter != "r" && sw.parameter != "sn_coef") {
                    throw ConfigError("mc.sweep.parameter: expected \"horizon\", \"r\" or \"sn_coef\"");
                }
                if (sw.values.empty()) {
                    throw ConfigError("mc.sweep.values: must not be empty");
                }
                c.sweep = std::move(sw);
            }
        }
        if (c.replications < 1) {
            throw ConfigError("mc.replications must be >= 1");
        }
        if (family_of(c.sim.kernel1) != c.qmle.family) {
            throw ConfigError("qmle.kernel must match sim.kernel");
        }
        if (!(2.0 * c.qmle.r < c.sim.horizon)) {
            throw ConfigError("qmle.r: need 2r < sim.horizon");
        }
        c.scenarios();  // validates every swept value
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

inline RunConfig read_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        // nlohmann reports the byte offset; turn it into a line number
        std::ifstream again(path);
        std::string text((std::istreambuf_iterator<char>(again)), std::istreambuf_iterator<char>());
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        throw ParseError(path.string() + ": line " + std::to_string(line) + ": " + e.what());
    }
    return parse_run_config(doc);
}

// ----------------------------------------------------------------- reports

inline json fit_to_json(const FitResult& fit) {
    json j;
    j["theta"] = params_to_json(fit.theta_hat);
    j["lambda_hat"] = {fit.lambda_hat1, fit.lambda_hat2};
    j["objective"] = fit.objective;
    j["n_pairs"] = fit.n_pairs;
    j["iterations"] = fit.iterations;
    j["evaluations"] = fit.evaluations;
    j["optimizer_converged"] = fit.optimizer_converged;
    j["converged"] = fit.converged;
    j["grad_norm_fd"] = fit.grad_norm_fd;
    return j;
}

inline void write_report_csv(std::ostream& out, const McReport& r) {
    out << "parameter,mean,std,truth\n";
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        out << r.names[i] << ',' << format_double(r.mean[i]) << ',' << format_double(r.std[i]) << ','
            << format_double(r.truth[i]) << '\n';
    }
}

inline json report_to_json(const McReport& r) {
    json j;
    j["label"] = r.label;
    j["parameters"] = r.names;
    j["truth"] = r.truth;
    j["mean"] = r.mean;
    j["std"] = r.std;
    j["replications"] = r.replications;
    j["n_converged"] = r.n_converged;
    j["wall_seconds"] = r.wall_seconds;
    json est = json::array();
    for (std::size_t k = 0; k < r.estimates.size(); ++k) {
        json row;
        row["replication"] = k;
        row["converged"] = static_cast<bool>(r.converged[k]);
        row["theta"] = json::array();
        for (double v : r.estimates[k]) {
            row["theta"].push_back(std::isfinite(v) ? json(v) : json(nullptr));
        }
        est.push_back(std::move(row));
    }
    j["estimates"] = std::move(est);
    return j;
}

/// Writes <label>.csv and <label>.json into dir.
inline void write_report(const std::filesystem::path& dir, const McReport& r) {
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / (r.label + ".csv"));
    std::ofstream js(dir / (r.label + ".json"));
    if (!csv || !js) {
        throw ParseError("cannot write report files in " + dir.string());
    }
    write_report_csv(csv, r);
    js << report_to_json(r).dump(2) << '\n';
}

/// Two rows (means, then stds) in the layout of the published tables.
inline std::string format_report_table(const McReport& r) {
    std::ostringstream out;
    auto row = [&](const char* what, const std::vector<double>& v) {
        out << "  " << what;
        for (double x : v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %10.4g", x);
            out << buf;
        }
        out << '\n';
    };
    out << r.label << "  (" << r.n_converged << "/" << r.replications << " converged, "
        << format_double(std::round(r.wall_seconds * 10.0) / 10.0) << " s)\n";
    out << "      ";
    for (const auto& n : r.names) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %10s", n.c_str());
        out << buf;
    }
    out << '\n';
    row("truth", r.truth);
    row("mean ", r.mean);
    row("std  ", r.std);
    return out.str();
}

}  // namespace nbnsp::io
