#pragma once

// Constitutive velocity laws v(rho) for rho_t + (rho v(rho))_x = 0.
//
// Every law is strictly decreasing on [0, inf) and finite at rho = 0, where it
// takes the free-flow speed v_max. No maximal density is imposed: v may turn
// negative for large rho.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftl/errors.hpp"

namespace ftl {

class VelocityModel {
public:
    enum class Kind {
        greenshields,
        pipes_munjal,
        underwood,
        modified_greenberg,
        custom_function,
        custom_table,
    };

    using Law = std::function<double(double)>;

    /// v(rho) = v_max (1 - rho)
    static VelocityModel greenshields(double v_max) {
        require_positive_speed(v_max);
        return VelocityModel(Kind::greenshields, v_max, 1.0);
    }

    /// v(rho) = v_max (1 - rho^alpha), alpha > 0
    static VelocityModel pipes_munjal(double v_max, double alpha) {
        require_positive_speed(v_max);
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw ConstructionError("pipes_munjal: alpha must be positive and finite");
        return VelocityModel(Kind::pipes_munjal, v_max, alpha);
    }

    /// v(rho) = v_max exp(-rho)
    static VelocityModel underwood(double v_max) {
        require_positive_speed(v_max);
        return VelocityModel(Kind::underwood, v_max, 1.0);
    }

    /// v(rho) = v_max log(1/(rho + alpha)) / log(1/alpha), 0 < alpha < 1.
    /// alpha >= 1 would make v non-decreasing, so it is rejected.
    static VelocityModel modified_greenberg(double v_max, double alpha) {
        require_positive_speed(v_max);
        if (!(alpha > 0.0 && alpha < 1.0))
            throw ConstructionError("modified_greenberg: alpha must lie in (0, 1)");
        return VelocityModel(Kind::modified_greenberg, v_max, alpha);
    }

    /// Closed-form user law. Without `derivative`, v' is approximated by
    /// centered differences with step `fd_step()`.
    static VelocityModel custom(Law velocity, Law derivative = {}, std::string name = "custom") {
        if (!velocity) throw ConstructionError("custom velocity: empty law");
        VelocityModel m(Kind::custom_function, 0.0, 0.0);
        m.v_max_ = velocity(0.0);
        if (!std::isfinite(m.v_max_)) throw ConstructionError("custom velocity: v(0) is not finite");
        m.law_ = std::move(velocity);
        m.law_derivative_ = std::move(derivative);
        m.name_ = std::move(name);
        return m;
    }

    /// Tabulated law, linearly interpolated. Nodes must start at rho = 0 and
    /// the tabulated speeds must be strictly decreasing. Evaluation beyond the
    /// last node is a domain error.
    static VelocityModel tabulated(std::vector<double> rho, std::vector<double> speed) {
        if (rho.size() < 2 || rho.size() != speed.size())
            throw ConstructionError("tabulated velocity: need >= 2 nodes and matching sizes");
        if (rho.front() != 0.0) throw ConstructionError("tabulated velocity: first node must be rho = 0");
        for (std::size_t i = 0; i + 1 < rho.size(); ++i) {
            if (!(rho[i + 1] > rho[i])) throw ConstructionError("tabulated velocity: nodes must increase");
            if (!(speed[i + 1] < speed[i]))
                throw ConstructionError("tabulated velocity: speeds must be strictly decreasing");
        }
        for (double s : speed)
            if (!std::isfinite(s)) throw ConstructionError("tabulated velocity: non-finite speed");
        VelocityModel m(Kind::custom_table, speed.front(), 0.0);
        m.table_rho_ = std::move(rho);
        m.table_v_ = std::move(speed);
        m.name_ = "tabulated";
        return m;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double v_max() const noexcept { return v_max_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    /// Largest admissible density (end of the table for tabulated laws).
    [[nodiscard]] double max_density() const noexcept {
        return kind_ == Kind::custom_table ? table_rho_.back() : std::numeric_limits<double>::infinity();
    }

    /// Step used for finite-difference derivatives, when the law has no
    /// closed-form derivative.
    [[nodiscard]] std::optional<double> fd_step() const noexcept {
        if (kind_ == Kind::custom_table || (kind_ == Kind::custom_function && !law_derivative_))
            return kFdStep;
        return std::nullopt;
    }

    [[nodiscard]] double eval(double rho) const {
        check_domain(rho);
        switch (kind_) {
            case Kind::greenshields: return v_max_ * (1.0 - rho);
            case Kind::pipes_munjal: return v_max_ * (1.0 - std::pow(rho, alpha_));
            case Kind::underwood: return v_max_ * std::exp(-rho);
            case Kind::modified_greenberg:
                if (rho == 0.0) return v_max_;
                return v_max_ * std::log(1.0 / (rho + alpha_)) / std::log(1.0 / alpha_);
            case Kind::custom_function: return rho == 0.0 ? v_max_ : law_(rho);
            case Kind::custom_table: return interpolate(rho);
        }
        return 0.0;
    }

    double operator()(double rho) const { return eval(rho); }

    [[nodiscard]] double derivative(double rho) const {
        check_domain(rho);
        switch (kind_) {
            case Kind::greenshields: return -v_max_;
            case Kind::pipes_munjal:
                if (rho == 0.0) {
                    if (alpha_ < 1.0) return -std::numeric_limits<double>::infinity();
                    return alpha_ == 1.0 ? -v_max_ : 0.0;
                }
                return -v_max_ * alpha_ * std::pow(rho, alpha_ - 1.0);
            case Kind::underwood: return -v_max_ * std::exp(-rho);
            case Kind::modified_greenberg: return -v_max_ / ((rho + alpha_) * std::log(1.0 / alpha_));
            case Kind::custom_function:
                if (law_derivative_) return law_derivative_(rho);
                return finite_difference(rho);
            case Kind::custom_table: return finite_difference(rho);
        }
        return 0.0;
    }

    /// rho * v'(rho), with the removable 0 * inf at rho = 0 resolved to 0.
    [[nodiscard]] double rho_times_derivative(double rho) const {
        check_domain(rho);
        if (rho == 0.0) return 0.0;
        if (kind_ == Kind::pipes_munjal) return -v_max_ * alpha_ * std::pow(rho, alpha_);
        return rho * derivative(rho);
    }

    /// f(rho) = rho v(rho); f(0) = 0.
    [[nodiscard]] double flux(double rho) const {
        const double v = eval(rho);
        return rho == 0.0 ? 0.0 : rho * v;
    }

    /// f'(rho) = v(rho) + rho v'(rho)
    [[nodiscard]] double flux_derivative(double rho) const { return eval(rho) + rho_times_derivative(rho); }

    /// Density where the flux peaks, when known in closed form.
    [[nodiscard]] std::optional<double> flux_argmax() const noexcept {
        switch (kind_) {
            case Kind::greenshields: return 0.5;
            case Kind::pipes_munjal: return std::pow(1.0 / (alpha_ + 1.0), 1.0 / alpha_);
            case Kind::underwood: return 1.0;
            default: return std::nullopt;
        }
    }

private:
    static constexpr double kFdStep = 1e-6;

    VelocityModel(Kind kind, double v_max, double alpha) : kind_(kind), v_max_(v_max), alpha_(alpha) {
        switch (kind) {
            case Kind::greenshields: name_ = "greenshields"; break;
            case Kind::pipes_munjal: name_ = "pipes_munjal"; break;
            case Kind::underwood: name_ = "underwood"; break;
            case Kind::modified_greenberg: name_ = "modified_greenberg"; break;
            default: break;
        }
    }

    static void require_positive_speed(double v_max) {
        if (!(v_max > 0.0) || !std::isfinite(v_max))
            throw ConstructionError("velocity: v_max must be positive and finite");
    }

    void check_domain(double rho) const {
        if (!std::isfinite(rho) || rho < 0.0)
            throw DomainError("velocity: density must be finite and non-negative");
        if (kind_ == Kind::custom_table && rho > table_rho_.back())
            throw DomainError("velocity: density beyond tabulated range");
    }

    [[nodiscard]] double interpolate(double rho) const {
        auto it = std::upper_bound(table_rho_.begin(), table_rho_.end(), rho);
        if (it == table_rho_.end()) return table_v_.back();
        const auto j = static_cast<std::size_t>(std::distance(table_rho_.begin(), it)) - 1;
        const double w = (rho - table_rho_[j]) / (table_rho_[j + 1] - table_rho_[j]);
        return table_v_[j] + w * (table_v_[j + 1] - table_v_[j]);
    }

    // Centered where possible, one-sided at the ends of the domain.
    [[nodiscard]] double finite_difference(double rho) const {
        const double h = kFdStep;
        const double lo = std::max(0.0, rho - h);
        const double hi = std::min(max_density(), rho + h);
        return (eval(hi) - eval(lo)) / (hi - lo);
    }

    Kind kind_;
    double v_max_;
    double alpha_;
    std::string name_;
    Law law_;
    Law law_derivative_;
    std::vector<double> table_rho_;
    std::vector<double> table_v_;
};

/// Sampled verification of the structural assumptions on [0, R]:
/// (V1) v strictly decreasing, (V2) v(0) = v_max, (V3) rho v'(rho) non-increasing.
struct AssumptionReport {
    bool strictly_decreasing = false;
    bool vmax_consistent = false;
    bool rho_dv_nonincreasing = false;
    double R = 0.0;
    std::vector<double> grid;

    [[nodiscard]] bool all() const noexcept { return strictly_decreasing && vmax_consistent && rho_dv_nonincreasing; }
};

inline AssumptionReport check_assumptions(const VelocityModel& model, double R, std::size_t samples) {
    if (!(R > 0.0) || samples < 2) throw std::invalid_argument("check_assumptions: need R > 0 and samples >= 2");
    AssumptionReport report;
    report.R = R;
    report.grid.resize(samples);
    for (std::size_t k = 0; k < samples; ++k)
        report.grid[k] = R * static_cast<double>(k) / static_cast<double>(samples - 1);

    report.vmax_consistent = model.eval(0.0) == model.v_max();

    report.strictly_decreasing = true;
    report.rho_dv_nonincreasing = true;
    double v_prev = model.eval(report.grid[0]);
    double g_prev = model.rho_times_derivative(report.grid[0]);
    for (std::size_t k = 1; k < samples; ++k) {
        const double rho = report.grid[k];
        const double v = model.eval(rho);
        const double g = model.rho_times_derivative(rho);
        if (!(v < v_prev)) report.strictly_decreasing = false;
        // Rounding slack only; the tabulated / FD laws are noisy at the 1e-10 level.
        if (g > g_prev + 1e-9 * (1.0 + std::abs(g_prev))) report.rho_dv_nonincreasing = false;
        v_prev = v;
        g_prev = g;
    }
    return report;
}

}  // namespace ftl
