#pragma once

// Density reconstructions of a particle configuration and the exact scaled
// 1-Wasserstein / L1 distances between them.
//
//   hat   : y_i on [x_i, x_{i+1}), zero elsewhere      (piecewise constant)
//   tilde : ell * sum_{i<N} delta_{x_i}                (empirical measure)
//   check : y_i on mass cells [i ell, (i+1) ell)       (Lagrangian density)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ftl/errors.hpp"
#include "ftl/initial_data.hpp"
#include "ftl/piecewise.hpp"

namespace ftl {

/// Non-negative piecewise-constant density; values[j] on [breakpoints[j], breakpoints[j+1]).
class PiecewiseConstantDensity {
public:
    PiecewiseConstantDensity(std::vector<double> breakpoints, std::vector<double> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        validate();
        cumulative_.assign(values_.size() + 1, 0.0);
        for (std::size_t j = 0; j < values_.size(); ++j)
            cumulative_[j + 1] = cumulative_[j] + values_[j] * (breakpoints_[j + 1] - breakpoints_[j]);
    }

    /// Same, with the cumulative masses at the breakpoints given exactly
    /// (e.g. i * ell for particle reconstructions).
    PiecewiseConstantDensity(std::vector<double> breakpoints, std::vector<double> values, std::vector<double> cumulative)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)), cumulative_(std::move(cumulative)) {
        validate();
        if (cumulative_.size() != breakpoints_.size() || cumulative_.front() != 0.0)
            throw ConstructionError("density: cumulative masses must start at 0 and match breakpoints");
        for (std::size_t j = 0; j + 1 < cumulative_.size(); ++j)
            if (cumulative_[j + 1] < cumulative_[j]) throw ConstructionError("density: cumulative masses must increase");
    }

    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const double> cumulative() const noexcept { return cumulative_; }
    [[nodiscard]] double total_mass() const noexcept { return cumulative_.back(); }

    [[nodiscard]] double density(double x) const noexcept {
        if (x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
        return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
    }

private:
    void validate() const {
        if (values_.empty() || breakpoints_.size() != values_.size() + 1)
            throw ConstructionError("density: need len(breakpoints) == len(values) + 1 >= 2");
        for (std::size_t j = 0; j + 1 < breakpoints_.size(); ++j)
            if (!(breakpoints_[j + 1] > breakpoints_[j])) throw ConstructionError("density: breakpoints must increase");
        for (double v : values_)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ConstructionError("density: values must be finite and >= 0");
    }

    std::vector<double> breakpoints_;
    std::vector<double> values_;
    std::vector<double> cumulative_;
};

/// Atoms of equal weight at non-decreasing positions.
class EmpiricalMeasure {
public:
    EmpiricalMeasure(std::vector<double> atoms, double weight) : atoms_(std::move(atoms)), weight_(weight) {
        if (atoms_.empty()) throw ConstructionError("empirical measure: no atoms");
        if (!(weight_ > 0.0)) throw ConstructionError("empirical measure: weight must be positive");
        if (!std::is_sorted(atoms_.begin(), atoms_.end()))
            throw ConstructionError("empirical measure: atoms must be non-decreasing");
    }

    [[nodiscard]] std::span<const double> atoms() const noexcept { return atoms_; }
    [[nodiscard]] double weight() const noexcept { return weight_; }
    [[nodiscard]] double total_mass() const noexcept { return static_cast<double>(atoms_.size()) * weight_; }

private:
    std::vector<double> atoms_;
    double weight_;
};

/// Densities y_i attached to the mass cells [i ell, (i+1) ell).
struct LagrangianDensity {
    std::vector<double> values;
    double ell = 0.0;

    [[nodiscard]] double total_mass() const noexcept { return static_cast<double>(values.size()) * ell; }
    [[nodiscard]] double operator()(double z) const noexcept {
        if (z < 0.0 || values.empty()) return 0.0;
        const auto i = static_cast<std::size_t>(z / ell);
        return i < values.size() ? values[i] : 0.0;
    }
};

inline PiecewiseConstantDensity hat_density(const ParticleConfiguration& config) {
    const auto x = config.positions();
    const std::size_t n = config.intervals();
    std::vector<double> cumulative(n + 1);
    for (std::size_t i = 0; i <= n; ++i) cumulative[i] = static_cast<double>(i) * config.ell();
    return PiecewiseConstantDensity(std::vector<double>(x.begin(), x.end()), config.densities(), std::move(cumulative));
}

/// Atoms at x_0..x_{N-1}; the leader carries no mass.
inline EmpiricalMeasure empirical(const ParticleConfiguration& config) {
    const auto x = config.positions();
    return EmpiricalMeasure(std::vector<double>(x.begin(), x.end() - 1), config.ell());
}

inline LagrangianDensity check_density(const ParticleConfiguration& config) {
    return LagrangianDensity{config.densities(), config.ell()};
}

using Measure = std::variant<PiecewiseConstantDensity, EmpiricalMeasure, InitialDatum>;

inline double total_mass(const Measure& m) {
    return std::visit(
        [](const auto& v) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, InitialDatum>)
                return v.mass();
            else
                return v.total_mass();
        },
        m);
}

/// Piecewise-linear CDF, 0 left of the support and L right of it.
inline PiecewiseMonotone cdf(const PiecewiseConstantDensity& d) {
    const auto b = d.breakpoints();
    const auto c = d.cumulative();
    return PiecewiseMonotone::linear(std::vector<double>(b.begin(), b.end()), std::vector<double>(c.begin(), c.end()));
}

/// Right-continuous step CDF: jumps by the weight at each atom.
inline PiecewiseMonotone cdf(const EmpiricalMeasure& m) {
    const auto a = m.atoms();
    std::vector<double> values(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) values[i] = static_cast<double>(i + 1) * m.weight();
    return PiecewiseMonotone::step(std::vector<double>(a.begin(), a.end()), std::move(values), 0.0);
}

inline PiecewiseMonotone cdf(const InitialDatum& d) {
    const auto b = d.breakpoints();
    std::vector<double> c(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) c[j] = d.cdf(b[j]);
    c.back() = d.mass();
    return PiecewiseMonotone::linear(std::vector<double>(b.begin(), b.end()), std::move(c));
}

inline PiecewiseMonotone cdf(const Measure& m) {
    return std::visit([](const auto& v) { return cdf(v); }, m);
}

/// X(z) = inf{x : F(x) > z} on [0, L); at z = L the rightmost support point
/// unless `value_at_mass` overrides it.
inline PiecewiseMonotone pseudo_inverse(const PiecewiseMonotone& F, std::optional<double> value_at_mass = std::nullopt) {
    return generalized_inverse(F, value_at_mass);
}

/// F(x) = |{z in [0, L) : X(z) <= x}| for a pseudo-inverse X on [0, L].
inline PiecewiseMonotone distribution(const PiecewiseMonotone& X) { return generalized_inverse(X); }

/// Piecewise-linear X^(z) = x_i + (z - i ell) / y_i on [i ell, (i+1) ell], X^(L) = x_N.
inline PiecewiseMonotone hat_pseudo_inverse(const ParticleConfiguration& config) {
    const auto x = config.positions();
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = static_cast<double>(i) * config.ell();
    return PiecewiseMonotone::linear(std::move(z), std::vector<double>(x.begin(), x.end()));
}

/// Step X~(z) = x_i on [i ell, (i+1) ell), X~(L) = x_N.
inline PiecewiseMonotone tilde_pseudo_inverse(const ParticleConfiguration& config) {
    const auto x = config.positions();
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = static_cast<double>(i) * config.ell();
    return PiecewiseMonotone::step(std::move(z), std::vector<double>(x.begin(), x.end()), x.front());
}

namespace detail {

inline double checked_common_mass(double m1, double m2) {
    const double L = std::max(m1, m2);
    if (std::abs(m1 - m2) > 1e-9 * L) throw MassMismatchError("wasserstein: total masses differ");
    return L;
}

}  // namespace detail

/// d_{L,1} via cumulative distributions: int_R |F1 - F2| dx.
inline double wasserstein_cdf(const PiecewiseMonotone& F1, const PiecewiseMonotone& F2) {
    detail::checked_common_mass(F1.after(), F2.after());
    const double lo = std::min(F1.first_knot(), F2.first_knot());
    const double hi = std::max(F1.last_knot(), F2.last_knot());
    return l1_difference(F1, F2, lo, hi);
}

/// d_{L,1} via pseudo-inverses: int_0^L |X1 - X2| dz.
inline double wasserstein_quantile(const PiecewiseMonotone& X1, const PiecewiseMonotone& X2, double L) {
    return l1_difference(X1, X2, 0.0, L);
}

inline double wasserstein(const Measure& m1, const Measure& m2) {
    detail::checked_common_mass(total_mass(m1), total_mass(m2));
    return wasserstein_cdf(cdf(m1), cdf(m2));
}

/// int |d1 - d2| dx over the union of supports.
inline double l1_distance(const PiecewiseConstantDensity& d1, const PiecewiseConstantDensity& d2) {
    std::vector<double> cuts;
    detail::merge_knots(d1.breakpoints(), d2.breakpoints(), cuts);
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double a = cuts[j], b = cuts[j + 1];
        total += std::abs(d1.density(a) - d2.density(a)) * (b - a);
    }
    return total;
}

}  // namespace ftl
