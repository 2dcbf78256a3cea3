#pragma once

// Reference solutions for rho_t + f(rho)_x = 0 with concave f(rho) = rho v(rho):
// the exact Riemann solver, its superposition for piecewise-constant data
// (valid until the first wave interaction) and a first-order Godunov scheme.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "ftl/errors.hpp"
#include "ftl/initial_data.hpp"
#include "ftl/measures.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

/// Sampled concavity test of f on [0, rho_max]: second differences must not
/// be positive beyond rounding.
inline bool flux_is_concave(const VelocityModel& model, double rho_max, std::size_t samples = 512) {
    if (!(rho_max > 0.0)) return true;
    const double h = rho_max / static_cast<double>(samples);
    double scale = 0.0;
    std::vector<double> f(samples + 1);
    for (std::size_t j = 0; j <= samples; ++j) {
        f[j] = model.flux(h * static_cast<double>(j));
        scale = std::max(scale, std::abs(f[j]));
    }
    const double slack = 1e-9 * (scale + 1e-300);
    for (std::size_t j = 1; j < samples; ++j)
        if (f[j - 1] - 2.0 * f[j] + f[j + 1] > slack) return false;
    return true;
}

inline void require_concave_flux(const VelocityModel& model, double rho_max) {
    if (!flux_is_concave(model, rho_max))
        throw UnsupportedFluxError("flux of '" + model.name() + "' is not concave on the relevant density range");
}

struct RiemannSolution {
    enum class Wave { constant, shock, rarefaction };

    double left_state = 0.0;
    double right_state = 0.0;
    Wave wave = Wave::constant;
    /// Shock speed, or the fan edges f'(rho_l) >= ... >= f'(rho_r) reversed
    /// into speed_left <= speed_right. For a shock both equal the shock speed.
    double speed_left = 0.0;
    double speed_right = 0.0;

    [[nodiscard]] double speed() const noexcept { return speed_left; }
};

inline RiemannSolution riemann_solve(const VelocityModel& model, double rho_l, double rho_r) {
    if (!(rho_l >= 0.0) || !(rho_r >= 0.0)) throw DomainError("riemann_solve: states must be >= 0");
    require_concave_flux(model, std::max(rho_l, rho_r));
    RiemannSolution sol;
    sol.left_state = rho_l;
    sol.right_state = rho_r;
    if (rho_l == rho_r) {
        sol.speed_left = sol.speed_right = model.flux_derivative(rho_l);
        return sol;
    }
    if (rho_l < rho_r) {
        sol.wave = RiemannSolution::Wave::shock;
        sol.speed_left = sol.speed_right = (model.flux(rho_r) - model.flux(rho_l)) / (rho_r - rho_l);
        return sol;
    }
    sol.wave = RiemannSolution::Wave::rarefaction;
    sol.speed_left = model.flux_derivative(rho_l);
    sol.speed_right = model.flux_derivative(rho_r);
    return sol;
}

/// rho(t, x) of the self-similar solution centred at x = 0.
inline double riemann_eval(const RiemannSolution& sol, const VelocityModel& model, double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("riemann_eval: t must be positive");
    const double xi = x / t;
    switch (sol.wave) {
        case RiemannSolution::Wave::constant: return sol.left_state;
        case RiemannSolution::Wave::shock: return xi < sol.speed_left ? sol.left_state : sol.right_state;
        case RiemannSolution::Wave::rarefaction: break;
    }
    if (xi <= sol.speed_left) return sol.left_state;
    if (xi >= sol.speed_right) return sol.right_state;
    // f' is decreasing: solve f'(rho) = xi on [rho_r, rho_l].
    auto g = [&](double rho) { return model.flux_derivative(rho) - xi; };
    const double lo = sol.right_state, hi = sol.left_state;
    if (g(lo) < 0.0 || g(hi) > 0.0) throw std::logic_error("riemann_eval: fan inversion not bracketed");
    std::uintmax_t iterations = 200;
    auto done = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
    const auto [a, b] = boost::math::tools::bisect(g, lo, hi, done, iterations);
    return 0.5 * (a + b);
}

/// Location of the maximum of f on [a, b] (f concave).
inline double flux_argmax_on(const VelocityModel& model, double a, double b) {
    if (auto peak = model.flux_argmax()) return std::clamp(*peak, a, b);
    auto neg = [&](double rho) { return -model.flux(rho); };
    return boost::math::tools::brent_find_minima(neg, a, b, std::numeric_limits<double>::digits / 2).first;
}

/// Exact Riemann flux at x/t = 0: min f on [rho_l, rho_r] if rho_l <= rho_r,
/// max f on [rho_r, rho_l] otherwise.
inline double godunov_flux(const VelocityModel& model, double rho_l, double rho_r) {
    if (rho_l <= rho_r) return std::min(model.flux(rho_l), model.flux(rho_r));
    const double peak = flux_argmax_on(model, rho_r, rho_l);
    return std::max({model.flux(rho_l), model.flux(rho_r), model.flux(peak)});
}

struct GodunovGrid {
    double x_left = 0.0;
    double dx = 0.0;
    double cfl = 0.0;
    std::vector<double> averages;
    double time = 0.0;
    std::size_t steps = 0;
    /// max over steps of |sum averages * dx - L| / L.
    double max_relative_mass_drift = 0.0;

    [[nodiscard]] std::vector<double> edges() const {
        std::vector<double> e(averages.size() + 1);
        for (std::size_t j = 0; j < e.size(); ++j) e[j] = x_left + dx * static_cast<double>(j);
        return e;
    }
    [[nodiscard]] double mass() const noexcept {
        double m = 0.0;
        for (double u : averages) m += u;
        return m * dx;
    }
};

/// First-order Godunov evolution to `t_end` on a uniform grid padded so that
/// no wave reaches the boundary: pad >= (|v_max| + |v(R)| + v_max) t_end.
inline GodunovGrid godunov_solve(const InitialDatum& datum, const VelocityModel& model, double dx, double cfl,
                                 double t_end) {
    if (!(dx > 0.0)) throw std::invalid_argument("godunov: dx must be positive");
    if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("godunov: cfl must lie in (0, 1)");
    if (!(t_end >= 0.0)) throw std::invalid_argument("godunov: t_end must be >= 0");
    const double R = datum.sup_norm();
    require_concave_flux(model, R);

    const double vR = model.eval(R);
    const double pad = (std::abs(model.v_max()) + std::abs(vR) + model.v_max()) * t_end + 2.0 * dx;
    const double lo = datum.x_min() - pad;
    const auto cells = static_cast<std::size_t>(std::ceil((datum.x_max() + pad - lo) / dx));

    GodunovGrid g;
    g.x_left = lo;
    g.dx = dx;
    g.cfl = cfl;
    g.averages.resize(cells);
    for (std::size_t j = 0; j < cells; ++j) {
        const double a = lo + dx * static_cast<double>(j);
        g.averages[j] = datum.mass_between(a, a + dx) / dx;
    }
    const double L = datum.mass();

    // f concave: |f'| peaks at an end of [0, R].
    const double speed = std::max(std::abs(model.flux_derivative(0.0)), std::abs(model.flux_derivative(R)));
    const double dt_full = cfl * dx / speed;
    if (!(dt_full > 0.0) || !std::isfinite(dt_full)) throw std::runtime_error("godunov: time step underflow");

    std::vector<double> F(cells + 1, 0.0);
    while (g.time < t_end) {
        const double dt = std::min(dt_full, t_end - g.time);
        if (!(dt > 1e-15 * std::max(t_end, 1.0)) && g.time + dt < t_end)
            throw std::runtime_error("godunov: time step underflow");
        for (std::size_t j = 1; j < cells; ++j) F[j] = godunov_flux(model, g.averages[j - 1], g.averages[j]);
        F[0] = godunov_flux(model, 0.0, g.averages.front());
        F[cells] = godunov_flux(model, g.averages.back(), 0.0);
        const double lambda = dt / dx;
        for (std::size_t j = 0; j < cells; ++j) g.averages[j] -= lambda * (F[j + 1] - F[j]);
        g.time = (t_end - g.time - dt) <= 0.0 ? t_end : g.time + dt;
        ++g.steps;
        g.max_relative_mass_drift = std::max(g.max_relative_mass_drift, std::abs(g.mass() - L) / L);
    }
    return g;
}

/// Godunov cell averages at t_end as a density (round-off negatives clipped).
inline PiecewiseConstantDensity godunov(const InitialDatum& datum, const VelocityModel& model, double dx, double cfl,
                                        double t_end) {
    auto g = godunov_solve(datum, model, dx, cfl, t_end);
    for (double& u : g.averages) u = std::max(u, 0.0);
    auto edges = g.edges();
    return PiecewiseConstantDensity(std::move(edges), std::move(g.averages));
}

/// Entropy solution for piecewise-constant data made of the Riemann
/// solutions at each breakpoint (vacuum outside), exact until two adjacent
/// waves meet.
class WaveSolution {
public:
    WaveSolution(const InitialDatum& datum, const VelocityModel& model) : model_(model) {
        const auto b = datum.breakpoints();
        const auto v = datum.values();
        require_concave_flux(model, datum.sup_norm());
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double left = j == 0 ? 0.0 : v[j - 1];
            const double right = j < v.size() ? v[j] : 0.0;
            if (left == right) continue;
            waves_.push_back(Wave{b[j], riemann_solve(model, left, right)});
        }
        valid_until_ = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < waves_.size(); ++j) {
            const double closing = waves_[j].sol.speed_right - waves_[j + 1].sol.speed_left;
            if (closing > 0.0)
                valid_until_ = std::min(valid_until_, (waves_[j + 1].origin - waves_[j].origin) / closing);
        }
    }

    /// First wave-interaction time (+inf when waves never meet).
    [[nodiscard]] double valid_until() const noexcept { return valid_until_; }

    [[nodiscard]] double operator()(double t, double x) const {
        if (t > valid_until_) throw std::domain_error("wave solution: waves interact before t");
        if (waves_.empty()) return 0.0;
        if (t == 0.0) {
            double state = waves_.front().sol.left_state;
            for (const auto& w : waves_) state = x < w.origin ? state : w.sol.right_state;
            return state;
        }
        for (const auto& w : waves_) {
            if (x < w.origin + w.sol.speed_left * t) return w.sol.left_state;
            if (x <= w.origin + w.sol.speed_right * t) return riemann_eval(w.sol, model_, t, x - w.origin);
        }
        return waves_.back().sol.right_state;
    }

    /// Positions where rho(t, .) is not smooth: shocks and fan edges.
    [[nodiscard]] std::vector<double> kinks(double t) const {
        std::vector<double> k;
        for (const auto& w : waves_) {
            k.push_back(w.origin + w.sol.speed_left * t);
            k.push_back(w.origin + w.sol.speed_right * t);
        }
        std::sort(k.begin(), k.end());
        return k;
    }

private:
    struct Wave {
        double origin;
        RiemannSolution sol;
    };

    VelocityModel model_;
    std::vector<Wave> waves_;
    double valid_until_ = 0.0;
};

namespace detail {

// Cuts covering the density breakpoints and the wave kinks at time t.
inline std::vector<double> joint_cuts(const PiecewiseConstantDensity& d, const WaveSolution& exact, double t) {
    std::vector<double> cuts(d.breakpoints().begin(), d.breakpoints().end());
    const auto k = exact.kinks(t);
    cuts.insert(cuts.end(), k.begin(), k.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

// int_a^b |c - rho(t, x)| dx where rho(t, .) is smooth and monotone on (a, b).
inline double abs_gap_integral(const WaveSolution& exact, double t, double a, double b, double c) {
    using quad = boost::math::quadrature::gauss<double, 10>;
    auto h = [&](double x) { return exact(t, x) - c; };
    double ha = h(a + 1e-14 * (b - a)), hb = h(b - 1e-14 * (b - a));
    auto absint = [&](double lo, double hi) { return quad::integrate([&](double x) { return std::abs(h(x)); }, lo, hi); };
    if (ha * hb >= 0.0) return absint(a, b);
    double lo = a, hi = b;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        ((h(mid) > 0.0) == (ha > 0.0) ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    return absint(a, root) + absint(root, b);
}

}  // namespace detail

/// int |d(x) - rho(t, x)| dx.
inline double l1_error(const PiecewiseConstantDensity& d, const WaveSolution& exact, double t) {
    const auto cuts = detail::joint_cuts(d, exact, t);
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double a = cuts[j], b = cuts[j + 1];
        total += detail::abs_gap_integral(exact, t, a, b, d.density(0.5 * (a + b)));
    }
    return total;
}

/// Cell averages of rho(t, .) over the given edges.
inline PiecewiseConstantDensity project(const WaveSolution& exact, double t, std::vector<double> edges) {
    using quad = boost::math::quadrature::gauss<double, 10>;
    const auto kinks = exact.kinks(t);
    std::vector<double> values(edges.size() - 1);
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
        const double a = edges[j], b = edges[j + 1];
        std::vector<double> cuts{a};
        for (double k : kinks)
            if (k > a && k < b) cuts.push_back(k);
        cuts.push_back(b);
        double m = 0.0;
        for (std::size_t q = 0; q + 1 < cuts.size(); ++q)
            m += quad::integrate([&](double x) { return exact(t, x); }, cuts[q], cuts[q + 1]);
        values[j] = std::max(m / (b - a), 0.0);
    }
    return PiecewiseConstantDensity(std::move(edges), std::move(values));
}

/// Uniform edges of width `dx` covering [lo, hi] and the support of rho(t, .).
inline std::vector<double> covering_edges(const WaveSolution& exact, double t, double lo, double hi, double dx) {
    const auto k = exact.kinks(t);
    if (!k.empty()) {
        lo = std::min(lo, k.front());
        hi = std::max(hi, k.back());
    }
    const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / dx));
    std::vector<double> e(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) e[j] = lo + dx * static_cast<double>(j);
    return e;
}

}  // namespace ftl
