// ftl_cli: run simulations, convergence studies and assumption checks from a
// JSON configuration.
//
//   ftl_cli run      --config cfg.json [--out DIR] [--jobs K]
//   ftl_cli converge --config cfg.json [--out DIR] [--jobs K]
//   ftl_cli check    --config cfg.json
//
// Exit status is 0 iff every diagnostic passes.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ftl/harness/experiment.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    unsigned seed = 0;
    std::size_t jobs = 1;
};

ftl::harness::ExperimentConfig load(const Options& opt) {
    auto cfg = ftl::harness::load_config(opt.config);
    if (!opt.out.empty()) cfg.output_dir = opt.out;
    return cfg;
}

int run(const Options& opt) {
    const auto cfg = load(opt);
    const auto summary = ftl::harness::run_experiment(cfg, opt.jobs);
    for (const auto& r : summary.runs)
        std::printf("N=%-6zu steps=%-8zu violations=%zu %s\n", r.n, r.metadata.accepted_steps, r.violations,
                    r.passed ? "ok" : "FAILED");
    std::printf("manifest: %s\n", summary.manifest.string().c_str());
    return summary.passed() ? 0 : 1;
}

int converge(const Options& opt) {
    const auto cfg = load(opt);
    const auto table = ftl::harness::convergence_study(cfg, opt.jobs);
    std::printf("oracle: %s, T = %g\n", table.oracle.c_str(), table.t_end);
    std::printf("%8s %14s %14s %14s %14s %8s\n", "N", "d(init)", "ell*span", "d(T)", "L1(T)", "order");
    for (const auto& r : table.rows) {
        std::printf("%8zu %14.6e %14.6e %14.6e %14.6e", r.n, r.initial_distance, r.initial_bound, r.wasserstein_error,
                    r.l1_error);
        if (r.l1_order)
            std::printf(" %8.3f\n", *r.l1_order);
        else
            std::printf(" %8s\n", "-");
    }
    const bool ok = table.initial_bounds_hold() && table.diagnostics_passed();
    if (!table.initial_bounds_hold()) std::printf("initial distance bound violated\n");
    if (!table.diagnostics_passed()) std::printf("diagnostics reported violations\n");
    return ok ? 0 : 1;
}

int check(const Options& opt) {
    const auto cfg = load(opt);
    const double R = cfg.datum.sup_norm();
    const auto rep = ftl::check_assumptions(cfg.velocity, R, 1001);
    const bool concave = ftl::flux_is_concave(cfg.velocity, R);
    std::printf("velocity law      : %s\n", cfg.velocity.name().c_str());
    std::printf("density range     : [0, %g]\n", R);
    std::printf("strictly decreasing (V1)      : %s\n", rep.strictly_decreasing ? "yes" : "NO");
    std::printf("v(0) = v_max (V2)             : %s\n", rep.vmax_consistent ? "yes" : "NO");
    std::printf("rho v'(rho) non-increasing (V3): %s\n", rep.rho_dv_nonincreasing ? "yes" : "NO");
    std::printf("concave flux (oracles)        : %s\n", concave ? "yes" : "NO");
    return rep.all() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Follow-the-leader particle solver for scalar conservation laws"};
    app.set_version_flag("--version", FTLPM_VERSION);
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub, bool outputs) {
        sub->add_option("--config", opt.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
        if (!outputs) return;
        sub->add_option("--out", opt.out, "Output directory (overrides output.dir)");
        sub->add_option("--seed", opt.seed, "Reserved; the scheme is deterministic");
        sub->add_option("--jobs", opt.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    };
    auto* run_cmd = app.add_subcommand("run", "Simulate each N and write trajectories and diagnostics");
    auto* conv_cmd = app.add_subcommand("converge", "Convergence table against the reference solution");
    auto* check_cmd = app.add_subcommand("check", "Report the velocity-law assumptions");
    add_common(run_cmd, true);
    add_common(conv_cmd, true);
    add_common(check_cmd, false);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return run(opt);
        if (*conv_cmd) return converge(opt);
        return check(opt);
    } catch (const ftl::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
