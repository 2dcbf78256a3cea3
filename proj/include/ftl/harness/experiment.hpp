#pragma once

// Configuration-driven runs: single simulations with diagnostics and
// convergence studies over the particle number N.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ftl/diagnostics.hpp"
#include "ftl/dynamics.hpp"
#include "ftl/harness/config.hpp"
#include "ftl/harness/io.hpp"
#include "ftl/initial_data.hpp"
#include "ftl/measures.hpp"
#include "ftl/reference.hpp"

#ifndef FTLPM_VERSION
#define FTLPM_VERSION "unknown"
#endif

namespace ftl::harness {

/// Calls fn(0..count-1) on up to `jobs` threads; rethrows the first failure
/// in index order.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < count;) {
            try {
                fn(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::string run_label(std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "N%05zu", n);
    return buf;
}

inline json provenance() {
    return {{"tool", "ftlpm"},
            {"version", FTLPM_VERSION},
            {"compiler", __VERSION__},
            {"json_library", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

struct RunSummary {
    std::size_t n = 0;
    double ell = 0.0;
    IntegratorMetadata metadata;
    std::size_t violations = 0;
    bool passed = false;
};

struct ExperimentSummary {
    std::vector<RunSummary> runs;
    std::filesystem::path manifest;

    [[nodiscard]] bool passed() const noexcept {
        return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) { return r.passed; });
    }
};

namespace detail {

struct SimulationResult {
    Trajectory trajectory;
    DiagnosticsReport report;
};

inline SimulationResult simulate(const ExperimentConfig& config, std::size_t n) {
    const auto config0 = atomize(config.datum, n);
    SimulationResult r{integrate(config0, config.velocity, config.t_end, config.integrator, config.sample_times), {}};
    DiagnosticsOptions opts;
    opts.delta = config.delta;
    opts.k_grid = config.k_grid;
    r.report = run_diagnostics(r.trajectory, config.velocity, config.datum, opts);
    return r;
}

inline void write_run(ArtifactSink& sink, const SimulationResult& r) {
    std::vector<PiecewiseConstantDensity> densities;
    for (const auto& s : r.trajectory.states) densities.push_back(hat_density(s));
    sink.write("trajectory.csv", trajectory_csv(r.trajectory));
    sink.write("density.csv", density_csv(r.trajectory.sample_times, densities));
    sink.write("quantile_final.csv", quantile_csv(hat_pseudo_inverse(r.trajectory.final())));
    sink.write_json("diagnostics.json", to_json(r.report));
    sink.write("diagnostics.csv", diagnostics_csv(r.report));
}

inline RunSummary summarize(std::size_t n, const SimulationResult& r) {
    return RunSummary{n, r.trajectory.initial().ell(), r.trajectory.metadata, r.report.violations.size(),
                      r.report.passed()};
}

inline json to_json(const RunSummary& s, const std::string& dir) {
    return {{"N", s.n},
            {"ell", s.ell},
            {"dir", dir},
            {"integrator", harness::to_json(s.metadata)},
            {"violations", s.violations},
            {"passed", s.passed}};
}

}  // namespace detail

/// Simulates every N of the configuration and writes, per run,
/// trajectory/density/quantile CSVs and the diagnostics report, plus a
/// top-level manifest with SHA-256 digests of all files.
inline ExperimentSummary run_experiment(const ExperimentConfig& config, std::size_t jobs = 1) {
    const std::size_t count = config.n_list.size();
    std::vector<std::optional<detail::SimulationResult>> results(count);
    parallel_for(count, jobs, [&](std::size_t k) { results[k] = detail::simulate(config, config.n_list[k]); });

    ArtifactSink top(config.output_dir);
    ExperimentSummary summary;
    json runs = json::array();
    for (std::size_t k = 0; k < count; ++k) {
        const auto label = run_label(config.n_list[k]);
        ArtifactSink sink(config.output_dir / label);
        detail::write_run(sink, *results[k]);
        top.absorb(sink, label);
        summary.runs.push_back(detail::summarize(config.n_list[k], *results[k]));
        runs.push_back(detail::to_json(summary.runs.back(), label));
    }
    json manifest = {{"provenance", provenance()},
                     {"config", config.source},
                     {"runs", runs},
                     {"passed", summary.passed()},
                     {"files", top.manifest_entries()}};
    ArtifactSink(config.output_dir).write_json("manifest.json", manifest);
    summary.manifest = config.output_dir / "manifest.json";
    return summary;
}

struct ConvergenceRow {
    std::size_t n = 0;
    double ell = 0.0;
    /// d(rho~(0), rho_bar) and d(rho~(0), rho^(0)) against ell * (x_max - x_min).
    double initial_distance = 0.0;
    double initial_hat_distance = 0.0;
    double initial_bound = 0.0;
    /// d(rho^(T), oracle(T)) and int |rho^(T) - oracle(T)|.
    double wasserstein_error = 0.0;
    double l1_error = 0.0;
    std::optional<double> l1_order;
    std::optional<double> wasserstein_order;
    bool diagnostics_passed = false;

    [[nodiscard]] bool initial_bound_holds() const noexcept {
        return initial_distance <= initial_bound + 1e-10 && initial_hat_distance <= initial_bound + 1e-10;
    }
};

struct ConvergenceTable {
    std::string oracle;
    double t_end = 0.0;
    std::vector<ConvergenceRow> rows;

    [[nodiscard]] bool initial_bounds_hold() const noexcept {
        return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.initial_bound_holds(); });
    }
    [[nodiscard]] bool diagnostics_passed() const noexcept {
        return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.diagnostics_passed; });
    }
};

/// Reference solution at time T: exact waves while they do not interact,
/// Godunov otherwise (or as configured).
class Oracle {
public:
    Oracle(const ExperimentConfig& config, double t) : t_(t), dx_(config.oracle_dx()) {
        const auto kind = config.oracle.kind;
        if (kind == OracleKind::none) throw ConfigError("convergence study needs an oracle (oracle.kind != none)");
        if (kind != OracleKind::godunov) {
            WaveSolution waves(config.datum, config.velocity);
            if (waves.valid_until() >= t) {
                solution_ = std::move(waves);
                name_ = "exact";
            } else if (kind == OracleKind::exact) {
                throw ConfigError("oracle: waves interact before t_end; the exact oracle is unavailable");
            }
        }
        if (!solution_) {
            solution_ = godunov(config.datum, config.velocity, dx_, config.oracle.cfl, t);
            name_ = "godunov";
        }
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    [[nodiscard]] double l1_error(const PiecewiseConstantDensity& d) const {
        if (auto* w = std::get_if<WaveSolution>(&*solution_)) return ftl::l1_error(d, *w, t_);
        return l1_distance(d, std::get<PiecewiseConstantDensity>(*solution_));
    }

    [[nodiscard]] double wasserstein_error(const PiecewiseConstantDensity& d) const {
        if (auto* w = std::get_if<WaveSolution>(&*solution_)) {
            const auto b = d.breakpoints();
            return wasserstein(d, project(*w, t_, covering_edges(*w, t_, b.front(), b.back(), dx_)));
        }
        return wasserstein(d, std::get<PiecewiseConstantDensity>(*solution_));
    }

    /// Oracle density on its own grid (projection for the exact solution).
    [[nodiscard]] PiecewiseConstantDensity density() const {
        if (auto* w = std::get_if<WaveSolution>(&*solution_)) {
            const auto k = w->kinks(t_);
            return project(*w, t_, covering_edges(*w, t_, k.front(), k.back(), dx_));
        }
        return std::get<PiecewiseConstantDensity>(*solution_);
    }

private:
    double t_;
    double dx_;
    std::string name_;
    std::optional<std::variant<WaveSolution, PiecewiseConstantDensity>> solution_;
};

inline std::string convergence_csv(const ConvergenceTable& table) {
    CsvWriter w({"N", "ell", "initial_distance", "initial_hat_distance", "initial_bound", "wasserstein_error",
                 "l1_error", "l1_order", "wasserstein_order"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : table.rows)
        w.row(r.n, r.ell, r.initial_distance, r.initial_hat_distance, r.initial_bound, r.wasserstein_error, r.l1_error,
              r.l1_order.value_or(nan), r.wasserstein_order.value_or(nan));
    return w.str();
}

inline json to_json(const ConvergenceTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"N", r.n},
                        {"ell", r.ell},
                        {"initial_distance", r.initial_distance},
                        {"initial_hat_distance", r.initial_hat_distance},
                        {"initial_bound", r.initial_bound},
                        {"initial_bound_holds", r.initial_bound_holds()},
                        {"wasserstein_error", r.wasserstein_error},
                        {"l1_error", r.l1_error},
                        {"l1_order", detail::optional_json(r.l1_order)},
                        {"wasserstein_order", detail::optional_json(r.wasserstein_order)},
                        {"diagnostics_passed", r.diagnostics_passed}});
    return {{"oracle", table.oracle}, {"t_end", table.t_end}, {"rows", rows}};
}

/// Runs every N, compares rho^(T) against the oracle and checks the
/// initial-time distance bound row by row. Writes convergence.{csv,json},
/// per-N diagnostics and a manifest under the output directory.
inline ConvergenceTable convergence_study(const ExperimentConfig& config, std::size_t jobs = 1) {
    if (config.n_list.size() < 3) throw ConfigError("convergence study needs at least three values of N");
    if (!(config.t_end > 0.0)) throw ConfigError("convergence study needs t_end > 0");
    const Oracle oracle(config, config.t_end);

    const std::size_t count = config.n_list.size();
    std::vector<ConvergenceRow> rows(count);
    std::vector<std::optional<detail::SimulationResult>> results(count);
    const auto datum_cdf = cdf(config.datum);
    const double span = config.datum.span_width();
    parallel_for(count, jobs, [&](std::size_t k) {
        auto r = detail::simulate(config, config.n_list[k]);
        const auto& init = r.trajectory.initial();
        const auto hat_final = hat_density(r.trajectory.final());
        auto& row = rows[k];
        row.n = config.n_list[k];
        row.ell = init.ell();
        row.initial_bound = init.ell() * span;
        const auto tilde_cdf = cdf(empirical(init));
        row.initial_distance = wasserstein_cdf(tilde_cdf, datum_cdf);
        row.initial_hat_distance = wasserstein_cdf(tilde_cdf, cdf(hat_density(init)));
        row.l1_error = oracle.l1_error(hat_final);
        row.wasserstein_error = oracle.wasserstein_error(hat_final);
        row.diagnostics_passed = r.report.passed();
        results[k] = std::move(r);
    });
    for (std::size_t k = 1; k < count; ++k) {
        const double scale = std::log(static_cast<double>(rows[k].n) / static_cast<double>(rows[k - 1].n));
        rows[k].l1_order = std::log(rows[k - 1].l1_error / rows[k].l1_error) / scale;
        rows[k].wasserstein_order = std::log(rows[k - 1].wasserstein_error / rows[k].wasserstein_error) / scale;
    }

    ConvergenceTable table{oracle.name(), config.t_end, std::move(rows)};
    ArtifactSink top(config.output_dir);
    top.write("convergence.csv", convergence_csv(table));
    top.write_json("convergence.json", to_json(table));
    const auto oracle_density = oracle.density();
    const double t_end = config.t_end;
    top.write("oracle_density.csv", density_csv(std::span<const double>(&t_end, 1),
                                                std::span<const PiecewiseConstantDensity>(&oracle_density, 1)));
    json runs = json::array();
    for (std::size_t k = 0; k < count; ++k) {
        const auto label = run_label(config.n_list[k]);
        ArtifactSink sink(config.output_dir / label);
        sink.write_json("diagnostics.json", to_json(results[k]->report));
        top.absorb(sink, label);
        runs.push_back(detail::to_json(detail::summarize(config.n_list[k], *results[k]), label));
    }
    json manifest = {{"provenance", provenance()},
                     {"config", config.source},
                     {"oracle", table.oracle},
                     {"runs", runs},
                     {"initial_bounds_hold", table.initial_bounds_hold()},
                     {"diagnostics_passed", table.diagnostics_passed()},
                     {"files", top.manifest_entries()}};
    ArtifactSink(config.output_dir).write_json("manifest.json", manifest);
    return table;
}

}  // namespace ftl::harness
