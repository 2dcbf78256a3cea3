#pragma once

// Piecewise-constant initial data and their equal-mass atomization into
// particle positions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ftl/errors.hpp"

namespace ftl {

/// Compactly supported, non-negative, piecewise-constant density.
/// values[j] holds on [breakpoints[j], breakpoints[j+1]).
class InitialDatum {
public:
    static InitialDatum from_piecewise(std::vector<double> breakpoints, std::vector<double> values) {
        if (breakpoints.size() != values.size() + 1 || values.empty())
            throw ConstructionError("initial datum: need len(breakpoints) == len(values) + 1 >= 2");
        for (double b : breakpoints)
            if (!std::isfinite(b)) throw ConstructionError("initial datum: non-finite breakpoint");
        for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
            if (!(breakpoints[j + 1] > breakpoints[j]))
                throw ConstructionError("initial datum: breakpoints must be strictly increasing");
        for (double v : values)
            if (!std::isfinite(v) || v < 0.0) throw ConstructionError("initial datum: values must be finite and >= 0");

        InitialDatum d;
        d.breakpoints_ = std::move(breakpoints);
        d.values_ = std::move(values);
        d.cumulative_.assign(d.values_.size() + 1, 0.0);
        for (std::size_t j = 0; j < d.values_.size(); ++j)
            d.cumulative_[j + 1] = d.cumulative_[j] + d.values_[j] * (d.breakpoints_[j + 1] - d.breakpoints_[j]);
        d.mass_ = d.cumulative_.back();
        if (!(d.mass_ > 0.0)) throw ConstructionError("initial datum: total mass must be positive");
        d.sup_norm_ = *std::max_element(d.values_.begin(), d.values_.end());

        std::size_t first = 0;
        while (d.values_[first] == 0.0) ++first;
        std::size_t last = d.values_.size() - 1;
        while (d.values_[last] == 0.0) --last;
        d.x_min_ = d.breakpoints_[first];
        d.x_max_ = d.breakpoints_[last + 1];
        return d;
    }

    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double mass() const noexcept { return mass_; }
    [[nodiscard]] double sup_norm() const noexcept { return sup_norm_; }
    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] double x_max() const noexcept { return x_max_; }
    [[nodiscard]] double span_width() const noexcept { return x_max_ - x_min_; }

    /// rho(x), right-continuous, zero outside the breakpoints.
    [[nodiscard]] double density(double x) const noexcept {
        if (x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
        return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
    }

    /// Cumulative mass F(x) = int_{-inf}^x rho.
    [[nodiscard]] double cdf(double x) const noexcept {
        if (x <= breakpoints_.front()) return 0.0;
        if (x >= breakpoints_.back()) return mass_;
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
        const auto j = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
        return cumulative_[j] + values_[j] * (x - breakpoints_[j]);
    }

    /// Exact int_a^b rho.
    [[nodiscard]] double mass_between(double a, double b) const {
        if (a > b) throw std::invalid_argument("mass_between: a > b");
        return cdf(b) - cdf(a);
    }

    /// min{x : F(x) >= level} for 0 < level < L, i.e. sup{x : F(x) < level}.
    /// Hitting a plateau exactly resolves to its left edge.
    [[nodiscard]] double level_crossing(double level) const {
        const double slack = 1e-14 * mass_;
        for (std::size_t j = 0; j < values_.size(); ++j) {
            if (values_[j] == 0.0) continue;
            if (cumulative_[j + 1] >= level - slack) {
                const double x = breakpoints_[j] + (level - cumulative_[j]) / values_[j];
                return std::clamp(x, breakpoints_[j], breakpoints_[j + 1]);
            }
        }
        return x_max_;
    }

private:
    InitialDatum() = default;

    std::vector<double> breakpoints_;
    std::vector<double> values_;
    std::vector<double> cumulative_;
    double mass_ = 0.0;
    double sup_norm_ = 0.0;
    double x_min_ = 0.0;
    double x_max_ = 0.0;
};

/// Time-stamped ordered particle positions x_0 < ... < x_N, each particle
/// carrying mass ell (the leader x_N carries none of the reconstructed mass).
class ParticleConfiguration {
public:
    ParticleConfiguration(double time, double mass_per_particle, std::vector<double> positions)
        : time_(time), ell_(mass_per_particle), x_(std::move(positions)) {
        if (!(time_ >= 0.0) || !std::isfinite(time_)) throw ConstructionError("configuration: time must be >= 0");
        if (!(ell_ > 0.0) || !std::isfinite(ell_)) throw ConstructionError("configuration: mass per particle must be > 0");
        if (x_.size() < 2) throw ConstructionError("configuration: need at least two particles");
        validate_ordering();
    }

    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] double ell() const noexcept { return ell_; }
    /// Number of gaps N (there are N + 1 particles).
    [[nodiscard]] std::size_t intervals() const noexcept { return x_.size() - 1; }
    [[nodiscard]] double total_mass() const noexcept { return static_cast<double>(intervals()) * ell_; }
    [[nodiscard]] std::span<const double> positions() const noexcept { return x_; }
    [[nodiscard]] double front() const noexcept { return x_.back(); }
    [[nodiscard]] double tail() const noexcept { return x_.front(); }

    [[nodiscard]] double gap(std::size_t i) const noexcept { return x_[i + 1] - x_[i]; }
    /// Discrete density y_i = ell / (x_{i+1} - x_i).
    [[nodiscard]] double density(std::size_t i) const noexcept { return ell_ / gap(i); }

    [[nodiscard]] std::vector<double> densities() const {
        std::vector<double> y(intervals());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = density(i);
        return y;
    }

    [[nodiscard]] double min_gap() const noexcept {
        double g = gap(0);
        for (std::size_t i = 1; i < intervals(); ++i) g = std::min(g, gap(i));
        return g;
    }

    [[nodiscard]] double max_gap() const noexcept {
        double g = gap(0);
        for (std::size_t i = 1; i < intervals(); ++i) g = std::max(g, gap(i));
        return g;
    }

    /// Largest discrete density max_i y_i.
    [[nodiscard]] double max_density() const noexcept { return ell_ / min_gap(); }

private:
    void validate_ordering() const {
        for (std::size_t i = 0; i + 1 < x_.size(); ++i)
            if (!(x_[i + 1] - x_[i] > 0.0) || !std::isfinite(x_[i]))
                throw ConstructionError("configuration: positions must be finite and strictly increasing");
        if (!std::isfinite(x_.back())) throw ConstructionError("configuration: non-finite position");
    }

    double time_;
    double ell_;
    std::vector<double> x_;
};

/// Equal-mass atomization: ell = L/N, x_0 = x_min, x_i = sup{x : int_{x_{i-1}}^x rho < ell},
/// x_N = x_max. Each level i*ell is inverted independently against the exact
/// CDF, so positions for N are reproduced exactly inside the 2N atomization.
inline ParticleConfiguration atomize(const InitialDatum& datum, std::size_t n) {
    if (n < 2) throw std::invalid_argument("atomize: need N >= 2");
    const double L = datum.mass();
    const double ell = L / static_cast<double>(n);
    std::vector<double> x(n + 1);
    x.front() = datum.x_min();
    x.back() = datum.x_max();
    for (std::size_t i = 1; i < n; ++i)
        x[i] = datum.level_crossing(L * static_cast<double>(i) / static_cast<double>(n));
    return ParticleConfiguration(0.0, ell, std::move(x));
}

}  // namespace ftl
