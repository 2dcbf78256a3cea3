#pragma once

// JSON experiment configuration.
//
// {
//   "velocity":   {"kind": "greenshields", "v_max": 1, "alpha": 2, "table": {"rho": [...], "v": [...]}},
//   "initial":    {"scenario": "riemann_like", "params": {...}}  |  {"breakpoints": [...], "values": [...]},
//   "experiment": {"N": [16, 32], "t_end": 0.5, "sample_times": [...] | "num_samples": 11,
//                  "delta": 0.25, "k_grid": [...] | "k_count": 50},
//   "integrator": {"method": "rk4_fixed", "dt": 1e-3, "abs_tol": 1e-10, "rel_tol": 1e-8, "gap_floor_safety": 0.5},
//   "oracle":     {"kind": "auto", "dx": 1e-3, "cfl": 0.5},
//   "output":     {"dir": "out"}
// }

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftl/diagnostics.hpp"
#include "ftl/dynamics.hpp"
#include "ftl/errors.hpp"
#include "ftl/initial_data.hpp"
#include "ftl/scenarios.hpp"
#include "ftl/velocity.hpp"

namespace ftl::harness {

using json = nlohmann::json;

enum class OracleKind { automatic, exact, godunov, none };

struct OracleSettings {
    OracleKind kind = OracleKind::automatic;
    /// Grid width; empty means support width / 4096.
    std::optional<double> dx;
    double cfl = 0.5;
};

struct ExperimentConfig {
    json source;
    VelocityModel velocity = VelocityModel::greenshields(1.0);
    InitialDatum datum = InitialDatum::from_piecewise({0.0, 1.0}, {1.0});
    std::vector<std::size_t> n_list;
    double t_end = 0.0;
    std::vector<double> sample_times;
    std::optional<double> delta;
    std::vector<double> k_grid;
    IntegratorSettings integrator;
    OracleSettings oracle;
    std::filesystem::path output_dir = "out";

    [[nodiscard]] double oracle_dx() const { return oracle.dx.value_or(datum.span_width() / 4096.0); }
};

namespace detail {

inline void reject_unknown(const json& obj, const char* section, std::set<std::string> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string("config: '") + section + "' must be an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key()))
            throw ConfigError(std::string("config: unknown key '") + section + "." + item.key() + "'");
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T require(const json& obj, const char* section, const char* key) {
    if (!obj.contains(key)) throw ConfigError(std::string("config: missing '") + section + "." + key + "'");
    return get_or<T>(obj, key, T{});
}

inline VelocityModel parse_velocity(const json& j) {
    reject_unknown(j, "velocity", {"kind", "v_max", "alpha", "table"});
    const auto kind = require<std::string>(j, "velocity", "kind");
    try {
        if (kind == "tabulated") {
            const json& t = j.at("table");
            return VelocityModel::tabulated(t.at("rho").get<std::vector<double>>(), t.at("v").get<std::vector<double>>());
        }
        const double v_max = get_or(j, "v_max", 1.0);
        if (kind == "greenshields") return VelocityModel::greenshields(v_max);
        if (kind == "pipes_munjal") return VelocityModel::pipes_munjal(v_max, require<double>(j, "velocity", "alpha"));
        if (kind == "underwood") return VelocityModel::underwood(v_max);
        if (kind == "modified_greenberg")
            return VelocityModel::modified_greenberg(v_max, require<double>(j, "velocity", "alpha"));
    } catch (const ConstructionError& e) {
        throw ConfigError(std::string("config: velocity: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: velocity.table: ") + e.what());
    }
    throw ConfigError("config: unknown velocity kind '" + kind + "'");
}

inline InitialDatum parse_initial(const json& j) {
    reject_unknown(j, "initial", {"scenario", "params", "breakpoints", "values"});
    try {
        if (j.contains("scenario")) {
            if (j.contains("breakpoints") || j.contains("values"))
                throw ConfigError("config: 'initial' takes either a scenario or explicit breakpoints, not both");
            ScenarioParams params;
            if (j.contains("params"))
                for (const auto& item : j.at("params").items()) params[item.key()] = item.value().get<double>();
            return make_scenario(j.at("scenario").get<std::string>(), params);
        }
        return InitialDatum::from_piecewise(require<std::vector<double>>(j, "initial", "breakpoints"),
                                            require<std::vector<double>>(j, "initial", "values"));
    } catch (const ConstructionError& e) {
        throw ConfigError(std::string("config: initial: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: initial: ") + e.what());
    }
}

inline IntegratorSettings parse_integrator(const json& j) {
    reject_unknown(j, "integrator", {"method", "dt", "abs_tol", "rel_tol", "gap_floor_safety"});
    IntegratorSettings s;
    const auto method = get_or<std::string>(j, "method", "rk4_fixed");
    if (method == "rk4_fixed")
        s.method = IntegratorSettings::Method::rk4_fixed;
    else if (method == "rk45_adaptive")
        s.method = IntegratorSettings::Method::rk45_adaptive;
    else
        throw ConfigError("config: unknown integrator method '" + method + "'");
    if (j.contains("dt")) s.dt = get_or(j, "dt", 0.0);
    s.abs_tol = get_or(j, "abs_tol", s.abs_tol);
    s.rel_tol = get_or(j, "rel_tol", s.rel_tol);
    s.gap_floor_safety = get_or(j, "gap_floor_safety", s.gap_floor_safety);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return s;
}

inline OracleSettings parse_oracle(const json& j) {
    reject_unknown(j, "oracle", {"kind", "dx", "cfl"});
    OracleSettings o;
    const auto kind = get_or<std::string>(j, "kind", "auto");
    if (kind == "auto")
        o.kind = OracleKind::automatic;
    else if (kind == "exact")
        o.kind = OracleKind::exact;
    else if (kind == "godunov")
        o.kind = OracleKind::godunov;
    else if (kind == "none")
        o.kind = OracleKind::none;
    else
        throw ConfigError("config: unknown oracle kind '" + kind + "'");
    if (j.contains("dx")) o.dx = get_or(j, "dx", 0.0);
    o.cfl = get_or(j, "cfl", o.cfl);
    if (o.dx && !(*o.dx > 0.0)) throw ConfigError("config: oracle.dx must be positive");
    if (!(o.cfl > 0.0 && o.cfl < 1.0)) throw ConfigError("config: oracle.cfl must lie in (0, 1)");
    return o;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    detail::reject_unknown(j, "<root>", {"velocity", "initial", "experiment", "integrator", "oracle", "output"});
    if (!j.contains("velocity") || !j.contains("initial") || !j.contains("experiment"))
        throw ConfigError("config: 'velocity', 'initial' and 'experiment' sections are required");

    ExperimentConfig c;
    c.source = j;
    c.velocity = detail::parse_velocity(j.at("velocity"));
    c.datum = detail::parse_initial(j.at("initial"));
    if (c.velocity.max_density() < c.datum.sup_norm())
        throw ConfigError("config: the velocity table does not cover the initial sup-norm");
    c.integrator = detail::parse_integrator(j.value("integrator", json::object()));
    c.oracle = detail::parse_oracle(j.value("oracle", json::object()));
    const json& out = j.value("output", json::object());
    detail::reject_unknown(out, "output", {"dir"});
    c.output_dir = detail::get_or<std::string>(out, "dir", "out");

    const json& e = j.at("experiment");
    detail::reject_unknown(e, "experiment", {"N", "t_end", "sample_times", "num_samples", "delta", "k_grid", "k_count"});
    if (e.contains("N") && e.at("N").is_number())
        c.n_list = {detail::require<std::size_t>(e, "experiment", "N")};
    else
        c.n_list = detail::require<std::vector<std::size_t>>(e, "experiment", "N");
    if (c.n_list.empty()) throw ConfigError("config: experiment.N must not be empty");
    for (std::size_t k = 0; k < c.n_list.size(); ++k) {
        if (c.n_list[k] < 2) throw ConfigError("config: every N must be >= 2");
        if (k > 0 && c.n_list[k] <= c.n_list[k - 1]) throw ConfigError("config: experiment.N must be strictly ascending");
    }

    c.t_end = detail::require<double>(e, "experiment", "t_end");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw ConfigError("config: t_end must be finite and >= 0");

    if (e.contains("delta")) {
        c.delta = detail::get_or(e, "delta", 0.0);
        if (c.t_end > 0.0 && !(*c.delta > 0.0 && *c.delta < c.t_end))
            throw ConfigError("config: delta must lie in (0, t_end)");
        if (c.t_end == 0.0) c.delta.reset();
    }

    if (e.contains("sample_times")) {
        if (e.contains("num_samples")) throw ConfigError("config: give sample_times or num_samples, not both");
        c.sample_times = detail::get_or<std::vector<double>>(e, "sample_times", {});
        for (std::size_t k = 0; k < c.sample_times.size(); ++k) {
            if (!(c.sample_times[k] >= 0.0 && c.sample_times[k] <= c.t_end))
                throw ConfigError("config: sample times must lie in [0, t_end]");
            if (k > 0 && !(c.sample_times[k] > c.sample_times[k - 1]))
                throw ConfigError("config: sample times must be strictly increasing");
        }
        if (c.sample_times.empty() || c.sample_times.front() != 0.0) c.sample_times.insert(c.sample_times.begin(), 0.0);
        if (c.sample_times.back() != c.t_end) c.sample_times.push_back(c.t_end);
    } else {
        const auto m = detail::get_or<std::size_t>(e, "num_samples", 11);
        if (m < 2) throw ConfigError("config: num_samples must be >= 2");
        if (c.t_end == 0.0) {
            c.sample_times = {0.0};
        } else {
            c.sample_times.resize(m);
            for (std::size_t k = 0; k < m; ++k)
                c.sample_times[k] = c.t_end * static_cast<double>(k) / static_cast<double>(m - 1);
            c.sample_times.back() = c.t_end;
        }
    }

    if (e.contains("k_grid")) {
        if (e.contains("k_count")) throw ConfigError("config: give k_grid or k_count, not both");
        c.k_grid = detail::get_or<std::vector<double>>(e, "k_grid", {});
        for (double k : c.k_grid)
            if (!(k >= 0.0)) throw ConfigError("config: k_grid values must be >= 0");
    } else {
        const auto count = detail::get_or<std::size_t>(e, "k_count", 50);
        if (count < 1) throw ConfigError("config: k_count must be >= 1");
        c.k_grid = default_k_grid(c.datum.sup_norm(), count);
    }
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace ftl::harness
