#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ftl/diagnostics.hpp"
#include "ftl/scenarios.hpp"

using ftl::ParticleConfiguration;
using ftl::VelocityModel;

namespace {

const auto greenshields = VelocityModel::greenshields(1.0);

ftl::Trajectory two_particle_run(std::vector<double> samples) {
    return ftl::integrate(ParticleConfiguration(0, 0.5, {0, 1}), greenshields, samples.back(), {}, samples);
}

}  // namespace

TEST(MinGapRatio, Examples) {
    const auto box = ftl::atomize(ftl::InitialDatum::from_piecewise({0, 1}, {0.8}), 16);
    EXPECT_NEAR(ftl::min_gap_ratio(box, 0.8), 1.0, 1e-14);
    const auto traj = two_particle_run({0.0, 3.0});
    EXPECT_NEAR(ftl::min_gap_ratio(traj.final(), 0.5), 2.0, 1e-6);
}

TEST(Oleinik, ZeroAtInitialTime) {
    const auto c = ftl::atomize(ftl::make_scenario("sawtooth_bv"), 32);
    const auto r = ftl::oleinik_residual(c, greenshields);
    for (double z : r.z) EXPECT_EQ(z, 0.0);
    EXPECT_FALSE(ftl::oleinik_slope_excess(c, greenshields).has_value());
}

TEST(Oleinik, TwoParticleLeaderTerm) {
    const auto traj = two_particle_run({0.0, 3.0});
    const auto r = ftl::oleinik_residual(traj.final(), greenshields);
    ASSERT_EQ(r.z.size(), 1u);
    // y(3) = 0.25 from the closed form; z = t y (v_max - v(y)).
    const double y = 0.5 / std::sqrt(1 + 2 * 0.25 * 3 / 0.5);
    EXPECT_NEAR(y, 0.25, 1e-15);
    EXPECT_NEAR(r.leader, 3 * y * (1 - (1 - y)), 1e-6);
    EXPECT_NEAR(r.leader, 0.1875, 1e-6);
    EXPECT_LE(r.max(), 0.5);
}

TEST(Oleinik, EqualGapsGiveZeroInterior) {
    const ParticleConfiguration c(2.0, 0.25, {0, 1, 2, 3, 4});
    const auto r = ftl::oleinik_residual(c, greenshields);
    EXPECT_EQ(r.interior_max, 0.0);
    EXPECT_DOUBLE_EQ(r.leader, 2.0 * 0.25 * 0.25);
    EXPECT_LT(*ftl::oleinik_slope_excess(c, greenshields), 0.0);
}

TEST(Oleinik, SlopeFormIsEquivalent) {
    // t y_i (v_{i+1} - v_i) <= ell  <=>  v_{i+1} - v_i <= gap_i / t.
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x{0};
        for (int i = 0; i < 6; ++i) x.push_back(x.back() + gap(rng));
        const ParticleConfiguration c(0.7, 0.1, x);
        const auto r = ftl::oleinik_residual(c, greenshields);
        const double excess = *ftl::oleinik_slope_excess(c, greenshields);
        EXPECT_EQ(r.interior_max <= c.ell() * (1 + 1e-12), excess <= 1e-12) << trial;
    }
}

TEST(TotalVariation, Examples) {
    EXPECT_DOUBLE_EQ(ftl::total_variation(ftl::PiecewiseConstantDensity({0, 1}, {0.5})), 1.0);
    EXPECT_DOUBLE_EQ(ftl::total_variation(ftl::LagrangianDensity{{1.0, 1.0 / 3}, 0.5}), 2.0);
    EXPECT_DOUBLE_EQ(ftl::total_variation(ftl::PiecewiseConstantDensity({0, 1, 2, 3}, {1, 0.5, 0.25})), 2.0);
}

TEST(TotalVariation, HatAndCheckAgree) {
    const auto c = ftl::atomize(ftl::make_scenario("double_hump"), 50);
    EXPECT_EQ(ftl::total_variation(ftl::hat_density(c)), ftl::total_variation(ftl::check_density(c)));
}

TEST(TotalVariation, AtomizationDoesNotIncrease) {
    for (const auto& name : ftl::scenario_names()) {
        const auto d = ftl::make_scenario(name);
        for (std::size_t n = 8; n <= 1024; n *= 2) {
            const auto c = ftl::atomize(d, n);
            EXPECT_LE(ftl::total_variation(ftl::hat_density(c)),
                      ftl::total_variation(d) + 1e-12 + ftl::tv_rounding_allowance(c))
                << name << " " << n;
        }
    }
}

TEST(TotalVariation, RoundingAllowanceIsSmall) {
    const auto c = ftl::atomize(ftl::make_scenario("sawtooth_bv"), 1024);
    EXPECT_GT(ftl::tv_rounding_allowance(c), 0.0);
    EXPECT_LT(ftl::tv_rounding_allowance(c), 1e-8);
}

TEST(VelocityBv, ConstantAndUniformState) {
    EXPECT_DOUBLE_EQ(ftl::c_delta(greenshields, 1.0, 1.0, 0.5), 7.0);
    EXPECT_THROW(ftl::c_delta(greenshields, 1.0, 1.0, 0.0), std::invalid_argument);
    const ParticleConfiguration c(0, 0.1, {0, 0.25, 0.5, 0.75});
    EXPECT_DOUBLE_EQ(ftl::velocity_total_variation(c, greenshields), 2 * (1 - greenshields(0.4)));
}

TEST(VelocityBv, BoundHoldsAfterDelta) {
    const auto d = ftl::make_scenario("sawtooth_bv");
    const auto traj = ftl::integrate(ftl::atomize(d, 128), greenshields, 1.0, {}, {0, 0.25, 0.5, 0.75, 1.0});
    const auto b = ftl::bv_velocity_bound(traj, greenshields, 0.25, d);
    EXPECT_EQ(b.times.size(), 4u);
    EXPECT_TRUE(b.exceedances.empty());
    EXPECT_DOUBLE_EQ(b.C_delta, 3 * (1 - greenshields(1.0)) + 2 * 2.0 / 0.25);
    EXPECT_THROW(ftl::bv_velocity_bound(traj, greenshields, -1, d), std::invalid_argument);
}

TEST(EntropyK, Examples) {
    const ParticleConfiguration c(0, 0.1, {0, 0.125, 0.625});  // y = (0.8, 0.2)
    for (double K : ftl::entropy_K_terms(c, greenshields, 0.0)) EXPECT_EQ(K, 0.0);
    const auto K = ftl::entropy_K_terms(c, greenshields, 0.5);
    ASSERT_EQ(K.size(), 2u);
    EXPECT_NEAR(K[0], 2 * 0.5 * (greenshields(0.2) - greenshields(0.5)), 1e-15);
    EXPECT_NEAR(K[0], 0.3, 1e-15);
    const auto low = ftl::entropy_K_terms(c, greenshields, 0.1);
    EXPECT_EQ(low[0], 0.0);
    EXPECT_THROW(ftl::entropy_K_terms(c, greenshields, -0.1), std::invalid_argument);
}

TEST(EntropyK, NonNegativeForAnyConfiguration) {
    // The sign bracket pairs with the sign of v(k) - v(y_i) for decreasing v.
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> gap(0.05, 2.0);
    const auto pm = VelocityModel::pipes_munjal(1.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x{0};
        for (int i = 0; i < 10; ++i) x.push_back(x.back() + gap(rng));
        const ParticleConfiguration c(0, 0.3, x);
        for (double k : ftl::default_k_grid(c.max_density(), 40))
            for (double K : ftl::entropy_K_terms(c, pm, k)) EXPECT_GE(K, 0.0);
    }
}

TEST(EntropyK, DefaultGrid) {
    const auto k = ftl::default_k_grid(2.0, 5);
    ASSERT_EQ(k.size(), 5u);
    EXPECT_EQ(k.front(), 0.0);
    EXPECT_DOUBLE_EQ(k.back(), 2.4);
}

TEST(TimeContinuity, TwoParticleRun) {
    const auto traj = two_particle_run({0.0, 0.1, 1.1});
    const auto rep = ftl::time_continuity_moduli(traj, greenshields, 0.1);
    EXPECT_TRUE(rep.holds());
    EXPECT_EQ(rep.l1_pairs, 1u);
    EXPECT_EQ(rep.wasserstein_pairs, 3u);
    // Direct evaluation on the closed form.
    auto y = [](double t) { return 0.5 / std::sqrt(1 + t); };
    const double l1 = 0.5 * std::abs(y(1.1) - y(0.1));
    EXPECT_NEAR(rep.l1_worst_slack, rep.l1_constant * 1.0 - l1, 1e-6);
    EXPECT_EQ(rep.R, 0.5);
    EXPECT_DOUBLE_EQ(rep.wasserstein_constant, 2 * 0.5 * 1.0);
    EXPECT_THROW(ftl::time_continuity_moduli(two_particle_run({0.0}), greenshields, 0.1), std::invalid_argument);
}

TEST(TimeContinuity, IdenticalSamplesGiveZero) {
    const auto c = ftl::atomize(ftl::make_scenario("box"), 8);
    ftl::Trajectory traj{{0.0, 0.0}, {c, c}, {}, c.max_density()};
    const auto rep = ftl::time_continuity_moduli(traj, greenshields, 0.1);
    EXPECT_EQ(rep.wasserstein_worst_slack, 0.0);
}

TEST(RunDiagnostics, CleanRunHasNoViolations) {
    for (const auto& name : ftl::scenario_names()) {
        const auto d = ftl::make_scenario(name);
        std::vector<double> samples;
        for (int k = 0; k <= 10; ++k) samples.push_back(0.1 * k);
        const auto traj = ftl::integrate(ftl::atomize(d, 64), greenshields, 1.0, {}, samples);
        ftl::DiagnosticsOptions opts;
        opts.delta = 0.25;
        const auto rep = ftl::run_diagnostics(traj, greenshields, d, opts);
        EXPECT_TRUE(rep.passed()) << name << ": " << (rep.violations.empty() ? "" : rep.violations[0].check);
        EXPECT_EQ(rep.samples.size(), samples.size());
        ASSERT_TRUE(rep.moduli.has_value());
        EXPECT_TRUE(rep.warnings.empty());
    }
}

TEST(RunDiagnostics, FlagsCorruptedState) {
    // A state denser than the initial maximum breaks the maximum principle.
    const auto d = ftl::make_scenario("box");
    const auto c0 = ftl::atomize(d, 4);
    const ParticleConfiguration bad(0.5, c0.ell(), {0.5, 0.55, 0.8, 1.1, 1.5});
    ftl::Trajectory traj{{0.0, 0.5}, {c0, bad}, {}, c0.max_density()};
    const auto rep = ftl::run_diagnostics(traj, greenshields, d);
    bool max_principle = false;
    for (const auto& v : rep.violations) max_principle |= v.check == "max_principle";
    EXPECT_TRUE(max_principle);
    EXPECT_FALSE(rep.passed());
}

TEST(RunDiagnostics, WarnsWhenV3Fails) {
    // rho v'(rho) = -2 rho + 3 rho^2 increases past 1/3.
    const auto m = VelocityModel::custom([](double r) { return 1 - 2 * r + 1.5 * r * r; },
                                         [](double r) { return -2 + 3 * r; }, "cubic");
    const auto d = ftl::InitialDatum::from_piecewise({0, 1}, {0.6});
    const auto traj = ftl::integrate(ftl::atomize(d, 8), m, 0.5, {}, {0, 0.5});
    const auto rep = ftl::run_diagnostics(traj, m, d);
    EXPECT_FALSE(rep.assumptions.rho_dv_nonincreasing);
    EXPECT_FALSE(rep.warnings.empty());
}
