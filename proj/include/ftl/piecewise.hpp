#pragma once

// Exact representation of monotone, right-continuous, piecewise-linear
// functions with jumps: cumulative distributions F and their pseudo-inverses
// X(z) = inf{x : F(x) > z}. All operations are closed-form breakpoint
// arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ftl {

/// g(s) = before              for s < knots[0]
///      = linear lo[j] -> hi[j] on [knots[j], knots[j+1])
///      = after               for s >= knots.back()
/// `hi[j]` is the left limit at knots[j+1]. Step functions have lo == hi.
class PiecewiseMonotone {
public:
    enum class Kind { step_right_continuous, piecewise_linear };

    PiecewiseMonotone() = default;

    PiecewiseMonotone(std::vector<double> knots, std::vector<double> lo, std::vector<double> hi, double before,
                      double after)
        : knots_(std::move(knots)), lo_(std::move(lo)), hi_(std::move(hi)), before_(before), after_(after) {
        if (knots_.empty()) throw std::invalid_argument("piecewise: need at least one knot");
        if (lo_.size() + 1 != knots_.size() || hi_.size() != lo_.size())
            throw std::invalid_argument("piecewise: inconsistent piece arrays");
        normalize();
        validate_monotone();
    }

    /// Right-continuous step function: value `before` left of steps[0],
    /// values[j] on [steps[j], steps[j+1]), values.back() from steps.back() on.
    static PiecewiseMonotone step(std::vector<double> steps, std::vector<double> values, double before) {
        if (steps.size() != values.size() || steps.empty())
            throw std::invalid_argument("piecewise step: sizes differ or empty");
        std::vector<double> lo(values.begin(), values.end() - 1);
        std::vector<double> hi = lo;
        const double after = values.back();
        return PiecewiseMonotone(std::move(steps), std::move(lo), std::move(hi), before, after);
    }

    /// Continuous interpolant through (knots[j], values[j]), constant outside.
    static PiecewiseMonotone linear(std::vector<double> knots, std::vector<double> values) {
        if (knots.size() != values.size() || knots.empty())
            throw std::invalid_argument("piecewise linear: sizes differ or empty");
        std::vector<double> lo(values.begin(), values.end() - 1);
        std::vector<double> hi(values.begin() + 1, values.end());
        const double before = values.front(), after = values.back();
        return PiecewiseMonotone(std::move(knots), std::move(lo), std::move(hi), before, after);
    }

    [[nodiscard]] Kind kind() const noexcept {
        for (std::size_t j = 0; j < lo_.size(); ++j)
            if (lo_[j] != hi_[j]) return Kind::piecewise_linear;
        return Kind::step_right_continuous;
    }

    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }
    [[nodiscard]] std::span<const double> lo() const noexcept { return lo_; }
    [[nodiscard]] std::span<const double> hi() const noexcept { return hi_; }
    [[nodiscard]] double before() const noexcept { return before_; }
    [[nodiscard]] double after() const noexcept { return after_; }
    [[nodiscard]] double first_knot() const noexcept { return knots_.front(); }
    [[nodiscard]] double last_knot() const noexcept { return knots_.back(); }
    [[nodiscard]] std::size_t pieces() const noexcept { return lo_.size(); }

    [[nodiscard]] double operator()(double s) const noexcept {
        if (s < knots_.front()) return before_;
        if (s >= knots_.back()) return after_;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
        const auto j = static_cast<std::size_t>(it - knots_.begin()) - 1;
        return value_in_piece(j, s);
    }

    /// Left limit g(s-).
    [[nodiscard]] double left_limit(double s) const noexcept {
        if (s <= knots_.front()) return before_;
        if (s > knots_.back()) return after_;
        auto it = std::lower_bound(knots_.begin(), knots_.end(), s);
        const auto j = static_cast<std::size_t>(it - knots_.begin()) - 1;
        return s == knots_[j + 1] ? hi_[j] : value_in_piece(j, s);
    }

    [[nodiscard]] double value_in_piece(std::size_t j, double s) const noexcept {
        if (lo_[j] == hi_[j]) return lo_[j];
        const double w = (s - knots_[j]) / (knots_[j + 1] - knots_[j]);
        return lo_[j] + w * (hi_[j] - lo_[j]);
    }

private:
    // Zero-length pieces (from merged or repeated breakpoints) are dropped.
    void normalize() {
        std::vector<double> k{knots_.front()}, lo, hi;
        for (std::size_t j = 0; j < lo_.size(); ++j) {
            if (!(knots_[j + 1] >= knots_[j])) throw std::invalid_argument("piecewise: knots must be non-decreasing");
            if (knots_[j + 1] == knots_[j]) continue;
            if (k.back() != knots_[j]) throw std::invalid_argument("piecewise: internal knot mismatch");
            lo.push_back(lo_[j]);
            hi.push_back(hi_[j]);
            k.push_back(knots_[j + 1]);
        }
        knots_ = std::move(k);
        lo_ = std::move(lo);
        hi_ = std::move(hi);
    }

    void validate_monotone() const {
        double level = before_;
        for (std::size_t j = 0; j < lo_.size(); ++j) {
            if (lo_[j] < level || hi_[j] < lo_[j]) throw std::invalid_argument("piecewise: function is not monotone");
            level = hi_[j];
        }
        if (after_ < level) throw std::invalid_argument("piecewise: function is not monotone");
    }

    std::vector<double> knots_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    double before_ = 0.0;
    double after_ = 0.0;
};

/// Generalized inverse H(s) = inf{t : g(t) > s} of a monotone g, defined for
/// s in [g.before(), g.after()). Jumps of g become flat pieces of H and flat
/// pieces of g become jumps of H. The result is `before = g.first_knot()` and
/// `after = g.last_knot()`; the latter is the value at s = g.after() unless
/// `value_at_top` overrides it.
inline PiecewiseMonotone generalized_inverse(const PiecewiseMonotone& g,
                                             std::optional<double> value_at_top = std::nullopt) {
    const auto t = g.knots();
    const auto lo = g.lo();
    const auto hi = g.hi();
    std::vector<double> knots, out_lo, out_hi;
    double level = g.before();
    knots.push_back(level);
    auto emit = [&](double s_end, double a, double b) {
        knots.push_back(s_end);
        out_lo.push_back(a);
        out_hi.push_back(b);
    };
    for (std::size_t j = 0; j < lo.size(); ++j) {
        if (lo[j] > level) emit(lo[j], t[j], t[j]);
        if (hi[j] > lo[j]) emit(hi[j], t[j], t[j + 1]);
        level = hi[j];
    }
    if (g.after() > level) emit(g.after(), t.back(), t.back());
    const double top = value_at_top.value_or(t.back());
    if (out_lo.empty()) {
        // Constant g: degenerate inverse on an empty range.
        return PiecewiseMonotone({level}, {}, {}, t.front(), top);
    }
    return PiecewiseMonotone(std::move(knots), std::move(out_lo), std::move(out_hi), t.front(), top);
}

namespace detail {

// Exact int_a^b |p(s)| for p linear with p(a) = pa, p(b) = pb.
inline double abs_linear_integral(double a, double b, double pa, double pb) noexcept {
    const double w = b - a;
    if ((pa >= 0.0 && pb >= 0.0) || (pa <= 0.0 && pb <= 0.0)) return 0.5 * w * std::abs(pa + pb);
    // Sign change: split at the root.
    const double root = w * pa / (pa - pb);
    return 0.5 * (std::abs(pa) * root + std::abs(pb) * (w - root));
}

inline void merge_knots(std::span<const double> a, std::span<const double> b, std::vector<double>& out) {
    out.clear();
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

// Value of g on the open interval (a, b) which contains no knot of g,
// evaluated at the interval ends as one-sided limits.
inline std::pair<double, double> piece_ends(const PiecewiseMonotone& g, double a, double b) noexcept {
    return {g(a), g.left_limit(b)};
}

}  // namespace detail

/// Exact int_lo^hi |g1 - g2| ds. Both functions are piecewise linear between
/// the merged knots, so each sub-interval integrates in closed form.
inline double l1_difference(const PiecewiseMonotone& g1, const PiecewiseMonotone& g2, double lo, double hi) {
    if (!(hi >= lo)) throw std::invalid_argument("l1_difference: empty range");
    std::vector<double> knots;
    detail::merge_knots(g1.knots(), g2.knots(), knots);
    std::vector<double> cuts{lo};
    for (double k : knots)
        if (k > lo && k < hi) cuts.push_back(k);
    cuts.push_back(hi);
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double a = cuts[j], b = cuts[j + 1];
        if (b <= a) continue;
        const auto [a1, b1] = detail::piece_ends(g1, a, b);
        const auto [a2, b2] = detail::piece_ends(g2, a, b);
        total += detail::abs_linear_integral(a, b, a1 - a2, b1 - b2);
    }
    return total;
}

}  // namespace ftl
