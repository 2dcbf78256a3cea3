#pragma once

// Certification of the discrete estimates along a computed trajectory:
// maximum principle, one-sided Oleinik bound, TV contractivity, the uniform
// BV bound on the velocity profile, time-continuity moduli and the sign of
// the entropy-inequality terms K_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftl/dynamics.hpp"
#include "ftl/initial_data.hpp"
#include "ftl/measures.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

/// min_i (x_{i+1} - x_i) / (ell / R).
inline double min_gap_ratio(const ParticleConfiguration& config, double R) {
    return config.min_gap() * R / config.ell();
}

struct OleinikResidual {
    /// z_0..z_{N-2} followed by the leader term z_{N-1}.
    std::vector<double> z;
    /// max over i <= N-2 (0 when N = 1).
    double interior_max = 0.0;
    double leader = 0.0;

    [[nodiscard]] double max() const noexcept { return std::max(interior_max, leader); }
};

/// z_i = t y_i (v(y_{i+1}) - v(y_i)) for i <= N-2, z_{N-1} = t y_{N-1} (v_max - v(y_{N-1})).
inline OleinikResidual oleinik_residual(const ParticleConfiguration& config, const VelocityModel& model) {
    const double t = config.time();
    const auto y = config.densities();
    const std::size_t n = y.size();
    OleinikResidual r;
    r.z.resize(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = model.eval(y[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        r.z[i] = t * y[i] * (v[i + 1] - v[i]);
        r.interior_max = i == 0 ? r.z[i] : std::max(r.interior_max, r.z[i]);
    }
    r.z[n - 1] = t * y[n - 1] * (model.v_max() - v[n - 1]);
    r.leader = r.z[n - 1];
    return r;
}

/// max_{i <= N-2} [v(y_{i+1}) - v(y_i) - (x_{i+1} - x_i) / t]; the one-sided
/// Lipschitz form of the Oleinik bound, expected <= 0. Empty at t = 0 or N = 1.
inline std::optional<double> oleinik_slope_excess(const ParticleConfiguration& config, const VelocityModel& model) {
    const double t = config.time();
    const std::size_t n = config.intervals();
    if (!(t > 0.0) || n < 2) return std::nullopt;
    double worst = -std::numeric_limits<double>::infinity();
    double v_here = model.eval(config.density(0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double v_next = model.eval(config.density(i + 1));
        worst = std::max(worst, v_next - v_here - config.gap(i) / t);
        v_here = v_next;
    }
    return worst;
}

namespace detail {

// Zero-padded total variation: jumps from and to vacuum at both ends.
inline double padded_variation(std::span<const double> values, double outside) {
    if (values.empty()) return 0.0;
    double tv = std::abs(values.front() - outside) + std::abs(values.back() - outside);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) tv += std::abs(values[i + 1] - values[i]);
    return tv;
}

inline double sgn(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

/// Rounding allowance for the TV of rho^: a position error of one ulp of
/// max|x| moves y_i by about eps max|x| y_i^2 / ell, counted in two jumps.
inline double tv_rounding_allowance(const ParticleConfiguration& config) {
    const auto x = config.positions();
    const double scale = std::max(std::abs(x.front()), std::abs(x.back()));
    double sum = 0.0;
    for (std::size_t i = 0; i < config.intervals(); ++i) sum += config.density(i) * config.density(i);
    return 4.0 * std::numeric_limits<double>::epsilon() * scale * sum / config.ell();
}

namespace detail {

}  // namespace detail

inline double total_variation(const PiecewiseConstantDensity& d) { return detail::padded_variation(d.values(), 0.0); }
inline double total_variation(const LagrangianDensity& d) { return detail::padded_variation(d.values, 0.0); }
inline double total_variation(const InitialDatum& d) { return detail::padded_variation(d.values(), 0.0); }

/// TV of x -> v(rho^(x)), with the vacuum outside [x_0, x_N) moving at v_max.
inline double velocity_total_variation(const ParticleConfiguration& config, const VelocityModel& model) {
    const auto y = config.densities();
    std::vector<double> v(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) v[i] = model.eval(y[i]);
    return detail::padded_variation(v, model.v_max());
}

/// C_delta = 3 (v_max - v(R)) + 2 (x_max - x_min) / delta.
inline double c_delta(const VelocityModel& model, double R, double support_width, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("c_delta: delta must be positive");
    return 3.0 * (model.v_max() - model.eval(R)) + 2.0 * support_width / delta;
}

struct VelocityBvBound {
    std::vector<double> times;
    std::vector<double> tv;
    double C_delta = 0.0;
    /// Times t >= delta with tv > C_delta + tolerance.
    std::vector<double> exceedances;
};

/// TV[v(rho^(t))] at each sample time t >= delta against C_delta built from
/// the datum's sup-norm and support hull.
inline VelocityBvBound bv_velocity_bound(const Trajectory& trajectory, const VelocityModel& model, double delta,
                                         const InitialDatum& datum, double tolerance = 1e-8) {
    if (!(delta > 0.0)) throw std::invalid_argument("bv_velocity_bound: delta must be positive");
    VelocityBvBound out;
    out.C_delta = c_delta(model, datum.sup_norm(), datum.span_width(), delta);
    for (const auto& state : trajectory.states) {
        if (state.time() < delta) continue;
        const double tv = velocity_total_variation(state, model);
        out.times.push_back(state.time());
        out.tv.push_back(tv);
        if (tv > out.C_delta + tolerance) out.exceedances.push_back(state.time());
    }
    return out;
}

/// K_i = k [v(k) - v(y_i)] {sgn(y_i - k) - sgn(y_{i-1} - k)}, i = 1..N, with y_N = 0.
inline std::vector<double> entropy_K_terms(const ParticleConfiguration& config, const VelocityModel& model, double k) {
    if (!(k >= 0.0)) throw std::invalid_argument("entropy_K_terms: k must be >= 0");
    const auto y = config.densities();
    const std::size_t n = y.size();
    const double vk = model.eval(k);
    std::vector<double> K(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double yi = i < n ? y[i] : 0.0;
        const double yp = y[i - 1];
        K[i - 1] = k * (vk - model.eval(yi)) * (detail::sgn(yi - k) - detail::sgn(yp - k));
    }
    return K;
}

/// `count` equispaced values over [0, 1.2 R].
inline std::vector<double> default_k_grid(double R, std::size_t count = 50) {
    std::vector<double> k(count);
    for (std::size_t j = 0; j < count; ++j)
        k[j] = count == 1 ? 0.0 : 1.2 * R * static_cast<double>(j) / static_cast<double>(count - 1);
    return k;
}

struct TimeContinuityReport {
    double R = 0.0;
    double C_delta = 0.0;
    /// Lipschitz constants of t -> rho^(t) in L1 (Lagrangian) and in d_{L,1}.
    double l1_constant = 0.0;
    double wasserstein_constant = 0.0;
    /// min over pairs of bound - observed; +inf when no pair qualified.
    double l1_worst_slack = std::numeric_limits<double>::infinity();
    double wasserstein_worst_slack = std::numeric_limits<double>::infinity();
    std::size_t l1_pairs = 0;
    std::size_t wasserstein_pairs = 0;

    [[nodiscard]] bool holds() const noexcept { return l1_worst_slack >= 0.0 && wasserstein_worst_slack >= 0.0; }
};

/// Checks, for all pairs of samples,
///   sum_i ell |y_i(t) - y_i(s)| <= R^2 (C_delta + v_max - v(R)) |t - s|        (s, t >= delta)
///   d_{L,1}(rho^(t), rho^(s))   <= 2 L max{|v_max|, |v(R)|, v_max - v(R)} |t - s|
/// with R and the support width taken from the initial discrete state.
inline TimeContinuityReport time_continuity_moduli(const Trajectory& trajectory, const VelocityModel& model,
                                                   double delta) {
    if (trajectory.states.size() < 2) throw std::invalid_argument("time_continuity_moduli: need >= 2 samples");
    if (!(delta > 0.0)) throw std::invalid_argument("time_continuity_moduli: delta must be positive");
    const auto& first = trajectory.initial();
    TimeContinuityReport rep;
    rep.R = trajectory.initial_max_density;
    const double width = first.front() - first.tail();
    const double vR = model.eval(rep.R);
    rep.C_delta = c_delta(model, rep.R, width, delta);
    rep.l1_constant = rep.R * rep.R * (rep.C_delta + model.v_max() - vR);
    const double L = first.total_mass();
    rep.wasserstein_constant =
        2.0 * L * std::max({std::abs(model.v_max()), std::abs(vR), model.v_max() - vR});

    const std::size_t m = trajectory.states.size();
    std::vector<PiecewiseMonotone> quantiles;
    quantiles.reserve(m);
    for (const auto& s : trajectory.states) quantiles.push_back(hat_pseudo_inverse(s));

    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const auto& sa = trajectory.states[a];
            const auto& sb = trajectory.states[b];
            const double dt = std::abs(sb.time() - sa.time());
            const double w = wasserstein_quantile(quantiles[a], quantiles[b], L);
            rep.wasserstein_worst_slack = std::min(rep.wasserstein_worst_slack, rep.wasserstein_constant * dt - w);
            ++rep.wasserstein_pairs;
            if (sa.time() < delta || sb.time() < delta) continue;
            double l1 = 0.0;
            for (std::size_t i = 0; i < sa.intervals(); ++i) l1 += std::abs(sb.density(i) - sa.density(i));
            l1 *= sa.ell();
            rep.l1_worst_slack = std::min(rep.l1_worst_slack, rep.l1_constant * dt - l1);
            ++rep.l1_pairs;
        }
    }
    return rep;
}

struct Tolerances {
    double max_principle = 1e-6;
    double oleinik_relative = 1e-6;
    double slope = 1e-8;
    double tv = 1e-8;
    double atomization_tv = 1e-12;
    double c_delta = 1e-8;
    double entropy = 1e-12;
    /// Multiplies the integrator's absolute tolerance for the leader law.
    double leader_factor = 10.0;
};

struct DiagnosticsOptions {
    /// Enables the C_delta and L1 time-continuity checks.
    std::optional<double> delta;
    /// Defaults to default_k_grid(R).
    std::vector<double> k_grid;
    Tolerances tolerances;
};

struct SampleRecord {
    double time = 0.0;
    double min_gap_ratio = 0.0;
    double oleinik_max = 0.0;
    double oleinik_leader = 0.0;
    std::optional<double> slope_excess;
    double tv_hat = 0.0;
    double tv_v_hat = 0.0;
    std::optional<double> C_delta;
    double entropy_min_K = 0.0;
    double leader_deviation = 0.0;
};

struct Violation {
    double time = 0.0;
    std::string check;
    double value = 0.0;
    double bound = 0.0;
};

struct DiagnosticsReport {
    std::vector<SampleRecord> samples;
    std::vector<Violation> violations;
    std::vector<std::string> warnings;
    AssumptionReport assumptions;
    double R = 0.0;
    double tv_initial_datum = 0.0;
    std::optional<TimeContinuityReport> moduli;

    [[nodiscard]] bool passed() const noexcept { return violations.empty(); }
};

/// Runs every check on every recorded sample of `trajectory`, which must
/// start from the atomization of `datum`.
inline DiagnosticsReport run_diagnostics(const Trajectory& trajectory, const VelocityModel& model,
                                         const InitialDatum& datum, const DiagnosticsOptions& options = {}) {
    if (trajectory.states.empty()) throw std::invalid_argument("diagnostics: empty trajectory");
    if (options.delta && !(*options.delta > 0.0)) throw std::invalid_argument("diagnostics: delta must be positive");
    const auto& tol = options.tolerances;
    DiagnosticsReport rep;
    rep.R = trajectory.initial_max_density;
    rep.tv_initial_datum = total_variation(datum);
    rep.assumptions = check_assumptions(model, datum.sup_norm(), 1001);
    const bool v3 = rep.assumptions.rho_dv_nonincreasing;
    if (!v3) rep.warnings.push_back("velocity law fails rho v'(rho) non-increasing; Oleinik and C_delta checks skipped");

    const std::vector<double> k_grid = options.k_grid.empty() ? default_k_grid(rep.R) : options.k_grid;
    std::optional<double> cd;
    if (options.delta) cd = c_delta(model, datum.sup_norm(), datum.span_width(), *options.delta);
    const double leader_bound = tol.leader_factor * trajectory.metadata.abs_tol;

    auto flag = [&](double t, const char* check, double value, double bound) {
        rep.violations.push_back(Violation{t, check, value, bound});
    };

    std::optional<double> tv_prev;
    for (const auto& state : trajectory.states) {
        const double t = state.time();
        SampleRecord rec;
        rec.time = t;

        rec.min_gap_ratio = min_gap_ratio(state, rep.R);
        if (rec.min_gap_ratio < 1.0 - tol.max_principle)
            flag(t, "max_principle", rec.min_gap_ratio, 1.0 - tol.max_principle);

        rec.leader_deviation = std::abs(state.front() - (datum.x_max() + model.v_max() * t));
        if (rec.leader_deviation > leader_bound) flag(t, "leader_law", rec.leader_deviation, leader_bound);

        const auto ole = oleinik_residual(state, model);
        rec.oleinik_max = ole.interior_max;
        rec.oleinik_leader = ole.leader;
        rec.slope_excess = oleinik_slope_excess(state, model);
        if (v3) {
            const double bound = state.ell() * (1.0 + tol.oleinik_relative);
            if (ole.interior_max > bound) flag(t, "oleinik", ole.interior_max, bound);
            if (ole.leader > bound) flag(t, "oleinik_leader", ole.leader, bound);
            if (rec.slope_excess && *rec.slope_excess > tol.slope) flag(t, "oleinik_slope", *rec.slope_excess, tol.slope);
        }

        rec.tv_hat = total_variation(hat_density(state));
        if (rec.tv_hat > rep.tv_initial_datum + tol.tv) flag(t, "tv_bound", rec.tv_hat, rep.tv_initial_datum + tol.tv);
        if (tv_prev && rec.tv_hat > *tv_prev + tol.tv) flag(t, "tv_monotone", rec.tv_hat, *tv_prev + tol.tv);
        if (t == 0.0) {
            const double bound = rep.tv_initial_datum + tol.atomization_tv + tv_rounding_allowance(state);
            if (rec.tv_hat > bound) flag(t, "atomization_tv", rec.tv_hat, bound);
        }
        tv_prev = rec.tv_hat;

        rec.tv_v_hat = velocity_total_variation(state, model);
        if (cd && t >= *options.delta) {
            rec.C_delta = cd;
            if (v3 && rec.tv_v_hat > *cd + tol.c_delta) flag(t, "c_delta", rec.tv_v_hat, *cd + tol.c_delta);
        }

        double kmin = std::numeric_limits<double>::infinity();
        for (double k : k_grid) {
            const auto K = entropy_K_terms(state, model, k);
            kmin = std::min(kmin, *std::min_element(K.begin(), K.end()));
        }
        rec.entropy_min_K = kmin;
        if (kmin < -tol.entropy) flag(t, "entropy_K", kmin, -tol.entropy);

        rep.samples.push_back(rec);
    }

    if (options.delta && trajectory.states.size() >= 2) {
        rep.moduli = time_continuity_moduli(trajectory, model, *options.delta);
        if (v3 && rep.moduli->l1_worst_slack < 0.0)
            flag(trajectory.final().time(), "l1_time_continuity", rep.moduli->l1_worst_slack, 0.0);
        if (rep.moduli->wasserstein_worst_slack < 0.0)
            flag(trajectory.final().time(), "wasserstein_time_continuity", rep.moduli->wasserstein_worst_slack, 0.0);
    }
    return rep;
}

}  // namespace ftl
