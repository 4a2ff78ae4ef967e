#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "regtree/asymptotics.hpp"

using regtree::LimitQuery;
using regtree::Params;

namespace {

double exact_tail(long n, long d, long k) { return std::exp(regtree::tail_log(Params(n, d), k)); }

// Trapezoid rule for integral_0^L exp(-x^2 a) dx on a fine grid; L chosen so the tail is negligible.
double gaussian_tail_integral(long d) {
    const double a = (static_cast<double>(d) - 2.0) / (2.0 * static_cast<double>(d));
    const double upper = std::sqrt(60.0 / a);
    const int steps = 200000;
    const double h = upper / steps;
    double sum = 0.5 * (1.0 + std::exp(-upper * upper * a));
    for (int i = 1; i < steps; ++i) {
        const double x = i * h;
        sum += std::exp(-x * x * a);
    }
    return sum * h;
}

}  // namespace

TEST(StirlingTail, Examples) {
    EXPECT_NEAR(regtree::stirling_tail_approx(Params(10000, 3), 1), 1.0, 1e-3);
    const double at100 = exact_tail(10000, 3, 100);
    EXPECT_LT(std::abs(regtree::stirling_tail_approx(Params(10000, 3), 100) / at100 - 1.0), 0.01);
    const double big = exact_tail(1000000, 4, 1000);
    EXPECT_LT(std::abs(regtree::stirling_tail_approx(Params(1000000, 4), 1000) / big - 1.0), 0.005);
}

TEST(StirlingTail, KEqualsNFallsBackToProduct) {
    const Params p(10, 3);
    EXPECT_DOUBLE_EQ(regtree::stirling_tail_approx(p, 10), exact_tail(10, 3, 10));
    EXPECT_THROW(regtree::stirling_tail_approx(p, 11), regtree::ParameterError);
}

TEST(StirlingTail, WithinOnePercentUpToTenRootN) {
    for (const long d : {3L, 4L, 5L}) {
        const long n = 10000;
        for (long k = 1; k <= 1000; k += 7) {
            const double rel = regtree::stirling_tail_approx(Params(n, d), k) / exact_tail(n, d, k) - 1.0;
            ASSERT_LT(std::abs(rel), 0.01) << "d=" << d << " k=" << k;
        }
    }
}

TEST(LimitExpression, Examples) {
    EXPECT_NEAR(regtree::limit_expression(1000000, LimitQuery{3, 0.3, {}}), 1.0, 1e-2);
    EXPECT_NEAR(regtree::limit_expression(1000000, LimitQuery{3, 0.5, {}}), std::exp(-1.0 / 6.0), 1e-2);
    EXPECT_LT(regtree::limit_expression(1000000, LimitQuery{3, 0.8, {}}), 1e-3);
}

TEST(LimitExpression, RejectsDegenerateInputs) {
    EXPECT_THROW(regtree::limit_expression(1, LimitQuery{3, 0.5, {}}), regtree::ParameterError);
    EXPECT_THROW(regtree::limit_expression(100, LimitQuery{2, 0.5, {}}), regtree::ParameterError);
    EXPECT_THROW(regtree::limit_expression(100, LimitQuery{3, 1.0, {}}), regtree::ParameterError);
    EXPECT_THROW(regtree::limit_expression(100, LimitQuery{3, -0.1, {}}), regtree::ParameterError);
    // round(2^0.99) = 2 = n
    EXPECT_THROW(regtree::limit_expression(2, LimitQuery{3, 0.99, {}}), regtree::ParameterError);
}

TEST(LimitExpression, RhoZeroIsExactlyOne) {
    for (const long n : {2L, 10L, 1000L, 1000000L}) {
        EXPECT_EQ(regtree::limit_expression(n, LimitQuery{4, 0.0, {}}), 1.0);
    }
}

TEST(LimitValue, Trichotomy) {
    EXPECT_EQ(regtree::limit_value(LimitQuery{3, 0.25, {}}), 1.0);
    EXPECT_NEAR(regtree::limit_value(LimitQuery{3, 0.5, {}}), 0.846482, 1e-6);
    EXPECT_EQ(regtree::limit_value(LimitQuery{10, 0.75, {}}), 0.0);
    EXPECT_THROW(regtree::limit_value(LimitQuery{2, 0.5, {}}), regtree::ParameterError);
}

TEST(LimitValue, PointwiseLimitOfExpression) {
    for (const long d : {3L, 4L, 10L}) {
        for (const double rho : {0.3, 0.5, 0.7}) {
            const LimitQuery query{d, rho, {}};
            EXPECT_LT(std::abs(regtree::limit_expression(1000000, query) - regtree::limit_value(query)), 1e-2)
                << "d=" << d << " rho=" << rho;
        }
    }
}

TEST(ScaledTail, Examples) {
    EXPECT_NEAR(regtree::scaled_tail(3, 1.0), 0.846482, 1e-6);
    EXPECT_NEAR(regtree::scaled_tail(3, 1e-9), 1.0, 1e-12);
    EXPECT_NEAR(regtree::scaled_tail(4, 2.0), 0.367879, 1e-6);
    EXPECT_THROW(regtree::scaled_tail(3, 0.0), regtree::ParameterError);
    EXPECT_THROW(regtree::scaled_tail(2, 1.0), regtree::ParameterError);
    EXPECT_THROW(regtree::scaled_tail(LimitQuery{3, 0.5, {}}), regtree::ParameterError);
}

TEST(ScaledTail, StrictlyDecreasing) {
    for (const long d : {3L, 4L, 7L}) {
        for (double x = 0.1; x < 4.0; x += 0.1) {
            ASSERT_GT(regtree::scaled_tail(d, x), regtree::scaled_tail(d, x + 0.1));
        }
    }
    // (d-2)/(2d) grows with d, so the tail shrinks with d.
    for (long d = 3; d < 30; ++d) {
        ASSERT_GT(regtree::scaled_tail(d, 1.5), regtree::scaled_tail(d + 1, 1.5));
    }
}

TEST(ScaledTail, FiniteNConverges) {
    for (const long d : {3L, 4L}) {
        for (const double x : {0.5, 1.0, 2.0}) {
            EXPECT_LT(std::abs(regtree::scaled_tail_finite(1000000, d, x) - regtree::scaled_tail(d, x)), 1e-2)
                << "d=" << d << " x=" << x;
        }
    }
}

TEST(ExpectationConstant, ClosedFormMatchesQuadrature) {
    EXPECT_NEAR(regtree::expectation_constant(3), 2.17080, 1e-5);
    EXPECT_NEAR(regtree::expectation_constant(4), std::sqrt(std::numbers::pi), 1e-12);  // 1.77245
    EXPECT_NEAR(regtree::expectation_constant(1000000), std::sqrt(std::numbers::pi / 2.0), 1e-5);
    for (const long d : {3L, 4L, 10L}) {
        EXPECT_NEAR(regtree::expectation_constant(d), gaussian_tail_integral(d), 1e-8);
    }
    EXPECT_THROW(regtree::expectation_constant(2), regtree::ParameterError);
}

TEST(ExpectationConstant, FiniteSumsApproachConstant) {
    for (const long d : {3L, 4L, 10L}) {
        const long n = 1000000;
        const double ratio = regtree::expectation_log(Params(n, d)) / std::sqrt(static_cast<double>(n));
        EXPECT_LT(std::abs(ratio / regtree::expectation_constant(d) - 1.0), 0.02) << "d=" << d;
    }
}

TEST(ConvergenceReport, GapsShrinkAtRhoHalf) {
    const auto report = regtree::convergence_report(LimitQuery{3, 0.5, {}}, {1000, 10000, 100000, 1000000});
    ASSERT_EQ(report.points.size(), 4u);
    EXPECT_NEAR(report.predicted, std::exp(-1.0 / 6.0), 1e-15);
    for (std::size_t i = 1; i < report.points.size(); ++i) {
        EXPECT_LT(report.points[i].gap, report.points[i - 1].gap);
    }
    EXPECT_LT(report.final_gap(), 0.01);
}

TEST(ConvergenceReport, RhoZeroIsConstantOne) {
    const auto report = regtree::convergence_report(LimitQuery{3, 0.0, {}}, {10, 100, 1000});
    EXPECT_EQ(report.predicted, 1.0);
    for (const auto& pt : report.points) {
        EXPECT_EQ(pt.value, 1.0);
        EXPECT_EQ(pt.gap, 0.0);
    }
}

TEST(ConvergenceReport, AboveHalfVanishes) {
    const auto report = regtree::convergence_report(LimitQuery{5, 0.6, {}}, {1000, 10000, 100000, 1000000});
    EXPECT_EQ(report.predicted, 0.0);
    EXPECT_LT(report.points.back().value, 1e-2);
}

TEST(ConvergenceReport, ScaledMode) {
    const auto report = regtree::convergence_report(LimitQuery{4, 0.5, 2.0}, {1000, 10000, 100000, 1000000});
    EXPECT_NEAR(report.predicted, std::exp(-1.0), 1e-15);
    EXPECT_LT(report.final_gap(), 1e-2);
}

TEST(ConvergenceReport, RejectsBadGrids) {
    EXPECT_THROW(regtree::convergence_report(LimitQuery{3, 0.5, {}}, {}), regtree::ParameterError);
    EXPECT_THROW(regtree::convergence_report(LimitQuery{3, 0.5, {}}, {100, 100}), regtree::ParameterError);
    EXPECT_THROW(regtree::convergence_report(LimitQuery{3, 0.5, {}}, {1000, 100}), regtree::ParameterError);
}
