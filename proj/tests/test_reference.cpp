#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ftl/reference.hpp"
#include "ftl/scenarios.hpp"

using ftl::RiemannSolution;
using ftl::VelocityModel;

namespace {

const auto greenshields = VelocityModel::greenshields(1.0);

}  // namespace

TEST(Riemann, ShockExample) {
    const auto s = ftl::riemann_solve(greenshields, 0.2, 0.8);
    EXPECT_EQ(s.wave, RiemannSolution::Wave::shock);
    EXPECT_NEAR(s.speed(), 0.0, 1e-15);
    EXPECT_EQ(ftl::riemann_eval(s, greenshields, 1.0, -0.1), 0.2);
    EXPECT_EQ(ftl::riemann_eval(s, greenshields, 1.0, 0.1), 0.8);
}

TEST(Riemann, RarefactionExample) {
    const auto s = ftl::riemann_solve(greenshields, 0.8, 0.2);
    EXPECT_EQ(s.wave, RiemannSolution::Wave::rarefaction);
    EXPECT_DOUBLE_EQ(s.speed_left, -0.6);
    EXPECT_DOUBLE_EQ(s.speed_right, 0.6);
    EXPECT_NEAR(ftl::riemann_eval(s, greenshields, 1.0, 0.0), 0.5, 1e-12);
    EXPECT_EQ(ftl::riemann_eval(s, greenshields, 1.0, -1.0), 0.8);
    EXPECT_EQ(ftl::riemann_eval(s, greenshields, 1.0, 1.0), 0.2);
    // Greenshields fan: rho = (1 - xi) / 2.
    for (double xi : {-0.5, -0.1, 0.3, 0.55}) EXPECT_NEAR(ftl::riemann_eval(s, greenshields, 2.0, 2 * xi), (1 - xi) / 2, 1e-12);
}

TEST(Riemann, ConstantAndErrors) {
    const auto s = ftl::riemann_solve(greenshields, 0.4, 0.4);
    EXPECT_EQ(s.wave, RiemannSolution::Wave::constant);
    EXPECT_EQ(ftl::riemann_eval(s, greenshields, 1.0, 3.0), 0.4);
    EXPECT_THROW(ftl::riemann_eval(s, greenshields, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ftl::riemann_solve(greenshields, -0.1, 0.2), ftl::DomainError);
    // f = rho (1 - rho + rho^2) has f'' = -2 + 6 rho > 0 beyond 1/3.
    const auto convexish = VelocityModel::custom([](double r) { return 1 - r + r * r; }, [](double r) { return -1 + 2 * r; });
    EXPECT_THROW(ftl::riemann_solve(convexish, 0.1, 0.9), ftl::UnsupportedFluxError);
    EXPECT_NO_THROW(ftl::riemann_solve(convexish, 0.1, 0.2));
}

TEST(Riemann, ShocksOnlyForIncreasingStates) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto pm = VelocityModel::pipes_munjal(1.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = u(rng), b = u(rng);
        const auto s = ftl::riemann_solve(pm, a, b);
        EXPECT_EQ(s.wave == RiemannSolution::Wave::shock, a < b);
        EXPECT_LE(s.speed_left, s.speed_right);
    }
}

TEST(Riemann, FanIsContinuousAndMonotone) {
    const auto pm = VelocityModel::pipes_munjal(1.0, 2.0);
    const auto s = ftl::riemann_solve(pm, 0.9, 0.1);
    const double eps = 1e-12;
    EXPECT_NEAR(ftl::riemann_eval(s, pm, 1.0, s.speed_left + eps), 0.9, 1e-9);
    EXPECT_NEAR(ftl::riemann_eval(s, pm, 1.0, s.speed_right - eps), 0.1, 1e-9);
    double prev = 1.0;
    for (int k = 0; k <= 200; ++k) {
        const double xi = s.speed_left + (s.speed_right - s.speed_left) * k / 200.0;
        const double rho = ftl::riemann_eval(s, pm, 1.0, xi);
        EXPECT_LE(rho, prev + 1e-12);
        prev = rho;
    }
}

TEST(GodunovFlux, Examples) {
    EXPECT_NEAR(ftl::godunov_flux(greenshields, 0.2, 0.8), 0.16, 1e-15);
    EXPECT_DOUBLE_EQ(ftl::godunov_flux(greenshields, 0.8, 0.2), 0.25);
    EXPECT_DOUBLE_EQ(ftl::godunov_flux(greenshields, 0.8, 0.6), greenshields.flux(0.6));
}

TEST(GodunovFlux, Consistency) {
    const std::vector<VelocityModel> models{greenshields, VelocityModel::pipes_munjal(1.0, 2.0), VelocityModel::underwood(1.0),
                                            VelocityModel::custom([](double r) { return 1 / (1 + r); })};
    for (const auto& m : models)
        for (int k = 0; k <= 50; ++k) {
            const double rho = 0.04 * k;
            EXPECT_EQ(ftl::godunov_flux(m, rho, rho), m.flux(rho)) << m.name();
        }
}

TEST(GodunovFlux, NumericArgmaxMatchesClosedForm) {
    // Custom law without a closed-form argmax goes through Brent.
    const auto closed = VelocityModel::pipes_munjal(1.0, 2.0);
    const auto numeric = VelocityModel::custom([](double r) { return 1 - r * r; });
    EXPECT_NEAR(ftl::godunov_flux(numeric, 0.9, 0.1), ftl::godunov_flux(closed, 0.9, 0.1), 1e-12);
}

TEST(Godunov, ConstantStateAndMass) {
    const auto d = ftl::InitialDatum::from_piecewise({0, 4}, {0.3});
    const auto g = ftl::godunov_solve(d, greenshields, 0.01, 0.5, 0.5);
    EXPECT_LE(g.max_relative_mass_drift, 1e-12);
    const auto rho = ftl::godunov(d, greenshields, 0.01, 0.5, 0.5);
    for (double x : {1.0, 2.0, 3.0}) EXPECT_NEAR(rho.density(x), 0.3, 1e-12);
    EXPECT_NEAR(rho.total_mass(), 1.2, 1e-12);
}

TEST(Godunov, MaximumPrincipleAndMass) {
    for (const auto& name : ftl::scenario_names()) {
        const auto d = ftl::make_scenario(name);
        const auto g = ftl::godunov_solve(d, greenshields, d.span_width() / 512, 0.5, 0.5);
        EXPECT_LE(g.max_relative_mass_drift, 1e-12) << name;
        for (double u : g.averages) {
            EXPECT_GE(u, -1e-14);
            EXPECT_LE(u, d.sup_norm() + 1e-12);
        }
        EXPECT_GT(g.steps, 0u);
    }
}

TEST(Godunov, Errors) {
    const auto d = ftl::make_scenario("box");
    EXPECT_THROW(ftl::godunov(d, greenshields, 0.0, 0.5, 1.0), std::invalid_argument);
    EXPECT_THROW(ftl::godunov(d, greenshields, 0.1, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ftl::godunov(d, greenshields, 0.1, 0.5, -1.0), std::invalid_argument);
}

TEST(Godunov, ConvergesToRiemannSolution) {
    const auto d = ftl::make_scenario("riemann_like");
    const ftl::WaveSolution exact(d, greenshields);
    ASSERT_GE(exact.valid_until(), 0.5);
    double prev = INFINITY;
    for (double dx : {0.02, 0.01, 0.005, 0.0025}) {
        const double err = ftl::l1_error(ftl::godunov(d, greenshields, dx, 0.5, 0.5), exact, 0.5);
        EXPECT_LT(err, prev) << dx;
        prev = err;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(WaveSolution, ValidityAndEvaluation) {
    const auto d = ftl::make_scenario("riemann_like");
    const ftl::WaveSolution exact(d, greenshields);
    EXPECT_NEAR(exact.valid_until(), 1.25, 1e-12);
    EXPECT_EQ(exact(0.0, -0.5), 0.8);
    EXPECT_EQ(exact(0.0, 0.5), 0.2);
    EXPECT_EQ(exact(0.0, 2.0), 0.0);
    EXPECT_THROW((void)exact(2.0, 0.0), std::domain_error);
    // Mass of the exact solution is conserved.
    const auto proj = ftl::project(exact, 0.5, ftl::covering_edges(exact, 0.5, -2, 2, 0.01));
    EXPECT_NEAR(proj.total_mass(), d.mass(), 1e-10);
}

TEST(WaveSolution, L1ErrorAgainstItsProjection) {
    const auto d = ftl::make_scenario("riemann_like");
    const ftl::WaveSolution exact(d, greenshields);
    const auto edges = ftl::covering_edges(exact, 0.5, -2, 2, 0.05);
    const auto coarse = ftl::project(exact, 0.5, edges);
    const auto fine = ftl::project(exact, 0.5, ftl::covering_edges(exact, 0.5, -2, 2, 0.0125));
    EXPECT_LT(ftl::l1_error(fine, exact, 0.5), ftl::l1_error(coarse, exact, 0.5));
    EXPECT_NEAR(ftl::l1_error(ftl::PiecewiseConstantDensity({-5, 5}, {0.0}), exact, 0.5), d.mass(), 1e-10);
}
