#pragma once

// Follow-the-leader particle dynamics
//
//   x_N' = v_max,   x_i' = v(ell / (x_{i+1} - x_i)),   i = 0..N-1,
//
// and the equivalent evolution of the discrete densities y_i = ell / (x_{i+1} - x_i).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftl/errors.hpp"
#include "ftl/initial_data.hpp"
#include "ftl/ode.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

namespace detail {

// Writes particle velocities; false when some gap is not positive.
inline bool ftl_velocities(std::span<const double> x, double ell, const VelocityModel& model,
                           std::span<double> out) {
    const std::size_t n = x.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = x[i + 1] - x[i];
        if (!(gap > 0.0)) return false;
        const double y = ell / gap;
        if (y > model.max_density()) return false;
        out[i] = model.eval(y);
    }
    out[n] = model.v_max();
    return true;
}

}  // namespace detail

/// Particle velocities for a configuration; the leader moves at v_max.
inline std::vector<double> ftl_rhs(const ParticleConfiguration& config, const VelocityModel& model) {
    std::vector<double> v(config.positions().size());
    if (!detail::ftl_velocities(config.positions(), config.ell(), model, v))
        throw DomainError("ftl_rhs: configuration outside the domain of the velocity law");
    return v;
}

/// Time derivative of the discrete densities:
///   y_{N-1}' = -y_{N-1}^2 / ell (v_max - v(y_{N-1})),
///   y_i'     = -y_i^2 / ell (v(y_{i+1}) - v(y_i)).
inline std::vector<double> lagrangian_rhs(std::span<const double> y, const VelocityModel& model, double ell) {
    if (y.empty()) throw std::invalid_argument("lagrangian_rhs: empty density list");
    if (!(ell > 0.0)) throw std::invalid_argument("lagrangian_rhs: ell must be positive");
    std::vector<double> out(y.size());
    for (double yi : y)
        if (!(yi > 0.0)) throw DomainError("lagrangian_rhs: densities must be positive");
    const std::size_t n = y.size();
    double v_right = model.v_max();
    for (std::size_t k = n; k-- > 0;) {
        const double v_here = model.eval(y[k]);
        out[k] = -y[k] * y[k] / ell * (v_right - v_here);
        v_right = v_here;
    }
    return out;
}

struct IntegratorSettings {
    enum class Method { rk4_fixed, rk45_adaptive };

    Method method = Method::rk4_fixed;
    /// Fixed step (rk4) or initial step (rk45). Empty: chosen from the data.
    std::optional<double> dt;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    /// Steps that shrink some gap below gap_floor_safety * ell / R are rejected.
    double gap_floor_safety = 0.5;

    void validate() const {
        if (dt && !(*dt > 0.0)) throw std::invalid_argument("integrator: dt must be positive");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("integrator: tolerances must be positive");
        if (!(gap_floor_safety > 0.0 && gap_floor_safety <= 1.0))
            throw std::invalid_argument("integrator: gap_floor_safety must lie in (0, 1]");
    }
};

inline const char* to_string(IntegratorSettings::Method m) {
    return m == IntegratorSettings::Method::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
}

struct IntegratorMetadata {
    IntegratorSettings::Method method = IntegratorSettings::Method::rk4_fixed;
    double dt_nominal = 0.0;
    double dt_min_used = std::numeric_limits<double>::infinity();
    double dt_max_used = 0.0;
    double abs_tol = 0.0;
    double rel_tol = 0.0;
    double gap_floor = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t gap_rejections = 0;
    std::size_t error_rejections = 0;
};

/// Particle states at the requested sample times.
struct Trajectory {
    std::vector<double> sample_times;
    std::vector<ParticleConfiguration> states;
    IntegratorMetadata metadata;
    /// Maximum discrete density of the initial state, max_i ell / (x_{i+1} - x_i).
    double initial_max_density = 0.0;

    [[nodiscard]] const ParticleConfiguration& initial() const { return states.front(); }
    [[nodiscard]] const ParticleConfiguration& final() const { return states.back(); }

    /// Linear interpolation in time between recorded samples. Interpolated
    /// states are not solutions of the particle system and can violate the
    /// tight discrete estimates; use them for plotting only.
    [[nodiscard]] ParticleConfiguration interpolate(double t) const {
        if (t <= sample_times.front()) return states.front();
        if (t >= sample_times.back()) return states.back();
        auto it = std::upper_bound(sample_times.begin(), sample_times.end(), t);
        const auto k = static_cast<std::size_t>(it - sample_times.begin());
        const double t0 = sample_times[k - 1], t1 = sample_times[k];
        const double w = (t - t0) / (t1 - t0);
        const auto a = states[k - 1].positions();
        const auto b = states[k].positions();
        std::vector<double> x(a.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - w) * a[i] + w * b[i];
        return ParticleConfiguration(t, states[k].ell(), std::move(x));
    }
};

/// Raised when the step size underflows; carries the last accepted state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, ParticleConfiguration last_state, double attempted_dt)
        : std::runtime_error(what), last_state_(std::move(last_state)), attempted_dt_(attempted_dt) {}

    [[nodiscard]] const ParticleConfiguration& last_state() const noexcept { return last_state_; }
    [[nodiscard]] double attempted_dt() const noexcept { return attempted_dt_; }

private:
    ParticleConfiguration last_state_;
    double attempted_dt_;
};

/// Default step: min(0.1 ell / (R (v_max - v(R)) + eps), span / 100).
inline double default_time_step(const ParticleConfiguration& config, const VelocityModel& model, double t_span) {
    const double R = config.max_density();
    const double spread = R * (model.v_max() - model.eval(R)) + 1e-12;
    double dt = 0.1 * config.ell() / spread;
    if (!(dt > 0.0)) dt = t_span / 100.0;
    if (t_span > 0.0) dt = std::min(dt, t_span / 100.0);
    return dt;
}

namespace detail {

inline double error_norm(std::span<const double> x0, std::span<const double> x1, std::span<const double> err,
                         double abs_tol, double rel_tol) {
    double e = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double scale = abs_tol + rel_tol * std::max(std::abs(x0[i]), std::abs(x1[i]));
        e = std::max(e, std::abs(err[i]) / scale);
    }
    return e;
}

inline bool gaps_above(std::span<const double> x, double floor) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i + 1] - x[i] >= floor)) return false;
    return true;
}

}  // namespace detail

/// Integrates the particle system from `config0` to `t_end`, recording the
/// state at each of `sample_times` (sorted, inside [t0, t_end]; empty means
/// {t0, t_end}).
inline Trajectory integrate(const ParticleConfiguration& config0, const VelocityModel& model, double t_end,
                            const IntegratorSettings& settings, std::vector<double> sample_times = {}) {
    settings.validate();
    const double t0 = config0.time();
    if (!(t_end >= t0) || !std::isfinite(t_end)) throw std::invalid_argument("integrate: t_end before start time");
    if (sample_times.empty()) sample_times = t_end > t0 ? std::vector<double>{t0, t_end} : std::vector<double>{t0};
    for (std::size_t k = 0; k < sample_times.size(); ++k) {
        if (sample_times[k] < t0 || sample_times[k] > t_end)
            throw std::invalid_argument("integrate: sample time outside [t0, t_end]");
        if (k > 0 && !(sample_times[k] > sample_times[k - 1]))
            throw std::invalid_argument("integrate: sample times must be strictly increasing");
    }

    Trajectory traj;
    traj.sample_times = sample_times;
    traj.initial_max_density = config0.max_density();
    auto& meta = traj.metadata;
    meta.method = settings.method;
    meta.abs_tol = settings.abs_tol;
    meta.rel_tol = settings.rel_tol;
    meta.gap_floor = settings.gap_floor_safety * config0.ell() / traj.initial_max_density;
    meta.dt_nominal = settings.dt.value_or(default_time_step(config0, model, t_end - t0));

    const double ell = config0.ell();
    auto rhs = [&](double, std::span<const double> x, std::span<double> dxdt) {
        return detail::ftl_velocities(x, ell, model, dxdt);
    };

    const std::size_t n = config0.positions().size();
    std::vector<double> x(config0.positions().begin(), config0.positions().end());
    std::vector<double> x_new(n), err(n);
    ode::Workspace work;
    double t = t0;
    double h_next = meta.dt_nominal;
    const double h_min = 1e-12 * std::max(std::abs(t_end), 1e-300);
    const bool adaptive = settings.method == IntegratorSettings::Method::rk45_adaptive;

    for (double target : sample_times) {
        while (t < target) {
            double h = std::min(adaptive ? h_next : meta.dt_nominal, target - t);
            const bool clipped = h < (adaptive ? h_next : meta.dt_nominal);
            for (;;) {
                if (!(h >= h_min) && !(h >= target - t))
                    throw IntegrationError("integrate: step size underflow at t = " + std::to_string(t),
                                           ParticleConfiguration(t, ell, x), h);
                bool ok = adaptive ? ode::dopri5_step(rhs, t, x, h, x_new, err, work)
                                   : ode::rk4_step(rhs, t, x, h, x_new, work);
                if (!ok || !detail::gaps_above(x_new, meta.gap_floor)) {
                    ++meta.gap_rejections;
                    h *= 0.5;
                    continue;
                }
                if (adaptive) {
                    const double e = detail::error_norm(x, x_new, err, settings.abs_tol, settings.rel_tol);
                    const double factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
                    if (e > 1.0) {
                        ++meta.error_rejections;
                        h *= factor;
                        continue;
                    }
                    if (!clipped || factor < 1.0) h_next = h * factor;
                }
                break;
            }
            x.swap(x_new);
            // Land exactly on the sample time.
            t = (target - t - h) <= 0.0 ? target : t + h;
            ++meta.accepted_steps;
            meta.dt_min_used = std::min(meta.dt_min_used, h);
            meta.dt_max_used = std::max(meta.dt_max_used, h);
        }
        traj.states.emplace_back(target, ell, x);
    }
    if (meta.accepted_steps == 0) meta.dt_min_used = 0.0;
    return traj;
}

/// Evolves the discrete densities directly with fixed-step RK4 (independent
/// route to the same dynamics, used for cross-checks).
inline std::vector<double> integrate_lagrangian(std::vector<double> y, const VelocityModel& model, double ell,
                                                double duration, double dt) {
    if (!(dt > 0.0) || !(duration >= 0.0)) throw std::invalid_argument("integrate_lagrangian: bad step or duration");
    auto rhs = [&](double, std::span<const double> state, std::span<double> out) {
        for (double v : state)
            if (!(v > 0.0)) return false;
        const auto d = lagrangian_rhs(state, model, ell);
        std::copy(d.begin(), d.end(), out.begin());
        return true;
    };
    ode::Workspace work;
    std::vector<double> next(y.size());
    double t = 0.0;
    while (t < duration) {
        const double h = std::min(dt, duration - t);
        if (!ode::rk4_step(rhs, t, y, h, next, work))
            throw DomainError("integrate_lagrangian: density left the admissible range");
        y.swap(next);
        t = (duration - t - h) <= 0.0 ? duration : t + h;
    }
    return y;
}

}  // namespace ftl
