#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ftl/velocity.hpp"

using ftl::VelocityModel;

namespace {

std::vector<VelocityModel> builtins() {
    return {VelocityModel::greenshields(1.0), VelocityModel::pipes_munjal(1.0, 2.0), VelocityModel::pipes_munjal(1.5, 0.5),
            VelocityModel::underwood(2.0), VelocityModel::modified_greenberg(1.0, 0.1)};
}

}  // namespace

TEST(Velocity, EvalExamples) {
    EXPECT_EQ(VelocityModel::greenshields(1.0)(0.0), 1.0);
    EXPECT_DOUBLE_EQ(VelocityModel::greenshields(1.0)(0.5), 0.5);
    EXPECT_EQ(VelocityModel::underwood(2.0)(0.0), 2.0);
    EXPECT_EQ(VelocityModel::modified_greenberg(3.0, 0.2)(0.0), 3.0);
}

TEST(Velocity, DerivativeExamples) {
    EXPECT_EQ(VelocityModel::greenshields(1.0).derivative(0.3), -1.0);
    EXPECT_DOUBLE_EQ(VelocityModel::pipes_munjal(1.0, 2.0).derivative(0.5), -1.0);
    EXPECT_DOUBLE_EQ(VelocityModel::underwood(1.0).derivative(0.0), -1.0);
}

TEST(Velocity, FluxExamples) {
    for (const auto& m : builtins()) EXPECT_EQ(m.flux(0.0), 0.0) << m.name();
    EXPECT_DOUBLE_EQ(VelocityModel::greenshields(1.0).flux(0.5), 0.25);
    EXPECT_DOUBLE_EQ(VelocityModel::greenshields(1.0).flux(1.0), 0.0);
}

TEST(Velocity, RejectsBadDensity) {
    const auto m = VelocityModel::greenshields(1.0);
    EXPECT_THROW(m(-0.1), ftl::DomainError);
    EXPECT_THROW(m(std::nan("")), ftl::DomainError);
    EXPECT_THROW((void)m.derivative(-1.0), ftl::DomainError);
    EXPECT_THROW(m(INFINITY), ftl::DomainError);
}

TEST(Velocity, RejectsBadParameters) {
    EXPECT_THROW(VelocityModel::greenshields(0.0), ftl::ConstructionError);
    EXPECT_THROW(VelocityModel::pipes_munjal(1.0, 0.0), ftl::ConstructionError);
    EXPECT_THROW(VelocityModel::modified_greenberg(1.0, 1.5), ftl::ConstructionError);
    EXPECT_THROW(VelocityModel::tabulated({0.1, 1.0}, {1.0, 0.0}), ftl::ConstructionError);
    EXPECT_THROW(VelocityModel::tabulated({0.0, 1.0}, {1.0, 1.0}), ftl::ConstructionError);
}

TEST(Velocity, StrictlyDecreasingOnSamples) {
    for (const auto& m : builtins()) {
        double prev = m(0.0);
        for (int k = 1; k <= 1000; ++k) {
            const double v = m(0.01 * k);
            ASSERT_LT(v, prev) << m.name() << " at " << 0.01 * k;
            prev = v;
        }
    }
}

TEST(Velocity, DerivativeMatchesCentredDifference) {
    const double h = 1e-6;
    for (const auto& m : builtins()) {
        for (int k = 1; k <= 500; ++k) {
            const double rho = 0.01 * k;
            const double fd = (m(rho + h) - m(rho - h)) / (2 * h);
            const double d = m.derivative(rho);
            EXPECT_LE(std::abs(d - fd), 1e-6 * (1 + std::abs(d))) << m.name() << " at " << rho;
        }
    }
}

TEST(Velocity, AssumptionsHoldForBuiltins) {
    EXPECT_TRUE(ftl::check_assumptions(VelocityModel::greenshields(1.0), 1.0, 100).all());
    EXPECT_TRUE(ftl::check_assumptions(VelocityModel::underwood(1.0), 1.0, 100).all());
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
        EXPECT_TRUE(ftl::check_assumptions(VelocityModel::pipes_munjal(1.0, alpha), 3.0, 200).all()) << alpha;
        EXPECT_TRUE(ftl::check_assumptions(VelocityModel::modified_greenberg(1.0, alpha / 4), 3.0, 200).all()) << alpha;
    }
}

TEST(Velocity, AssumptionReportRecordsGrid) {
    const auto rep = ftl::check_assumptions(VelocityModel::greenshields(1.0), 2.0, 5);
    ASSERT_EQ(rep.grid.size(), 5u);
    EXPECT_EQ(rep.grid.front(), 0.0);
    EXPECT_EQ(rep.grid.back(), 2.0);
}

TEST(Velocity, NonMonotoneCustomFailsV1) {
    // v' = -1 + 1.2 rho turns positive past 5/6.
    const auto m = VelocityModel::custom([](double r) { return 1 - r + 0.6 * r * r; }, {}, "bent");
    const auto rep = ftl::check_assumptions(m, 1.0, 100);
    EXPECT_FALSE(rep.strictly_decreasing);
    EXPECT_TRUE(rep.vmax_consistent);
}

TEST(Velocity, TabulatedInterpolatesAndRejectsOutOfRange) {
    const auto m = VelocityModel::tabulated({0.0, 0.5, 1.0}, {1.0, 0.6, 0.0});
    EXPECT_DOUBLE_EQ(m(0.25), 0.8);
    EXPECT_DOUBLE_EQ(m(0.75), 0.3);
    EXPECT_EQ(m.v_max(), 1.0);
    EXPECT_TRUE(m.fd_step().has_value());
    EXPECT_NEAR(m.derivative(0.25), -0.8, 1e-8);
    EXPECT_THROW(m(1.01), ftl::DomainError);
}

TEST(Velocity, FluxArgmaxClosedForms) {
    for (const auto& m : builtins()) {
        const auto peak = m.flux_argmax();
        if (!peak) continue;
        EXPECT_NEAR(m.flux_derivative(*peak), 0.0, 1e-12) << m.name();
    }
}
