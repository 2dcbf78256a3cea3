#pragma once

// Explicit Runge-Kutta steppers for autonomous-in-form systems x' = f(t, x).
//
// The right-hand side is a callable `bool f(double t, std::span<const double> x,
// std::span<double> dxdt)`; returning false marks the stage state as
// inadmissible and makes the whole step fail without throwing.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace ftl::ode {

struct Workspace {
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, stage;

    void resize(std::size_t n) {
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &stage}) v->resize(n);
    }
};

/// One classical RK4 step of size h from (t, x) into `out`.
template <class Rhs>
bool rk4_step(Rhs& f, double t, std::span<const double> x, double h, std::span<double> out, Workspace& w) {
    const std::size_t n = x.size();
    w.resize(n);
    if (!f(t, x, std::span<double>(w.k1))) return false;
    for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + 0.5 * h * w.k1[i];
    if (!f(t + 0.5 * h, std::span<const double>(w.stage), std::span<double>(w.k2))) return false;
    for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + 0.5 * h * w.k2[i];
    if (!f(t + 0.5 * h, std::span<const double>(w.stage), std::span<double>(w.k3))) return false;
    for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + h * w.k3[i];
    if (!f(t + h, std::span<const double>(w.stage), std::span<double>(w.k4))) return false;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + h / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    return true;
}

/// Dormand-Prince 5(4) step. On success writes the 5th-order solution to `out`
/// and the embedded error estimate to `err`.
template <class Rhs>
bool dopri5_step(Rhs& f, double t, std::span<const double> x, double h, std::span<double> out,
                 std::span<double> err, Workspace& w) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = x.size();
    w.resize(n);

    if (!f(t, x, std::span<double>(w.k1))) return false;
    for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + h * a21 * w.k1[i];
    if (!f(t + c2 * h, std::span<const double>(w.stage), std::span<double>(w.k2))) return false;
    for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + h * (a31 * w.k1[i] + a32 * w.k2[i]);
    if (!f(t + c3 * h, std::span<const double>(w.stage), std::span<double>(w.k3))) return false;
    for (std::size_t i = 0; i < n; ++i) w.stage[i] = x[i] + h * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
    if (!f(t + c4 * h, std::span<const double>(w.stage), std::span<double>(w.k4))) return false;
    for (std::size_t i = 0; i < n; ++i)
        w.stage[i] = x[i] + h * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
    if (!f(t + c5 * h, std::span<const double>(w.stage), std::span<double>(w.k5))) return false;
    for (std::size_t i = 0; i < n; ++i)
        w.stage[i] = x[i] + h * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] + a64 * w.k4[i] + a65 * w.k5[i]);
    if (!f(t + h, std::span<const double>(w.stage), std::span<double>(w.k6))) return false;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + h * (b1 * w.k1[i] + b3 * w.k3[i] + b4 * w.k4[i] + b5 * w.k5[i] + b6 * w.k6[i]);
    if (!f(t + h, std::span<const double>(out), std::span<double>(w.k7))) return false;
    for (std::size_t i = 0; i < n; ++i)
        err[i] = h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] + e6 * w.k6[i] + e7 * w.k7[i]);
    return true;
}

}  // namespace ftl::ode
