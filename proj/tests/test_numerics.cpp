#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "sicmos/errors.hpp"
#include "sicmos/numerics.hpp"

using namespace sicmos;

TEST(SolverOptions, RejectsInvalidFields) {
    SolverOptions o;
    EXPECT_NO_THROW(o.validate());
    o.abs_tol = 0.0;
    EXPECT_THROW(o.validate(), DomainError);
    o = {};
    o.rel_tol = -1.0;
    EXPECT_THROW(o.validate(), DomainError);
    o = {};
    o.max_iter = 0;
    EXPECT_THROW(o.validate(), DomainError);
    o = {};
    o.damping = 1.5;
    EXPECT_THROW(o.validate(), DomainError);
    o.damping = 0.0;
    EXPECT_THROW(o.validate(), DomainError);
}

TEST(SolveBracketed, LinearRoot) {
    const auto r = solve_bracketed([](double x) { return x - 2.0; }, 0.0, 5.0, {});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
}

TEST(SolveBracketed, CubicMatchesBisectionOracle) {
    auto f = [](double x) { return x * x * x - 8.0; };
    const double ref = oracle::bisect(f, 0.0, 5.0);
    const auto r = solve_bracketed(f, 0.0, 5.0, {});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, ref, 1e-12);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
}

TEST(SolveBracketed, NoSignChangeThrows) {
    EXPECT_THROW(solve_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0, {}), NoBracket);
}

TEST(SolveBracketed, NonFiniteInsideBracketThrows) {
    auto f = [](double x) { return x > 0.3 && x < 0.7 ? std::numeric_limits<double>::quiet_NaN() : x - 0.5; };
    EXPECT_THROW(solve_bracketed(f, 0.0, 1.0, {}), NonFinite);
}

TEST(SolveBracketed, InvalidIntervalThrows) {
    EXPECT_THROW(solve_bracketed([](double x) { return x; }, 1.0, -1.0, {}), DomainError);
}

TEST(SolveBracketed, EndpointRootReturnedImmediately) {
    const auto r = solve_bracketed([](double x) { return x; }, 0.0, 1.0, {});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.iterations, 0);
}

TEST(SolveBracketed, AnalyticSlopeIsUsed) {
    int calls = 0;
    auto f = [&](double x) -> ValueSlope {
        ++calls;
        return {std::exp(x) - 3.0, std::exp(x)};
    };
    const auto r = solve_bracketed(f, 0.0, 3.0, {});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, std::log(3.0), 1e-12);
    EXPECT_LT(calls, 20);
}

TEST(SolveBracketedProperty, NeverEvaluatesOutsideBracket) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> root_dist(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double root = root_dist(rng);
        const double lo = root - 1.0 - std::abs(root_dist(rng));
        const double hi = root + 0.5 + std::abs(root_dist(rng));
        bool outside = false;
        auto f = [&](double x) {
            if (x < lo || x > hi) outside = true;
            return std::atan(5.0 * (x - root)) + 0.1 * (x - root) * (x - root) * (x - root);
        };
        const auto r = solve_bracketed(f, lo, hi, {});
        EXPECT_FALSE(outside);
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.value, root, 1e-9);
        EXPECT_LE(r.iterations, SolverOptions{}.max_iter);
    }
}

TEST(SolveBracketedProperty, BisectionFallbackOnFlatFunction) {
    // Newton would overshoot badly on a cube-root shaped function.
    auto f = [](double x) { return std::cbrt(x - 1.234); };
    const auto r = solve_bracketed(f, -10.0, 10.0, {});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 1.234, 1e-8);
}

TEST(FixedPoint, ConstantMapOneIteration) {
    SolverOptions o;
    o.damping = 1.0;
    const auto r = fixed_point([](double) { return 5.0; }, 0.0, o);
    EXPECT_TRUE(r.converged);
    EXPECT_DOUBLE_EQ(r.value, 5.0);
    EXPECT_EQ(r.iterations, 1);
}

TEST(FixedPoint, CosineMatchesLongPlainIteration) {
    double ref = 1.0;
    for (int i = 0; i < 100000; ++i) ref = std::cos(ref);
    SolverOptions o;
    o.abs_tol = 1e-13;
    o.rel_tol = 1e-13;
    const auto r = fixed_point([](double x) { return std::cos(x); }, 1.0, o);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, ref, 1e-9);
    EXPECT_NEAR(r.value, 0.739085, 1e-6);
}

TEST(FixedPoint, DivergentMapNotConverged) {
    SolverOptions o;
    o.max_iter = 10;
    const auto r = fixed_point([](double x) { return 2.0 * x; }, 1.0, o);
    EXPECT_FALSE(r.converged);
    EXPECT_LE(r.iterations, 10);
}

TEST(FixedPoint, NonFiniteMapThrows) {
    EXPECT_THROW(fixed_point([](double) { return std::numeric_limits<double>::infinity(); }, 0.0, {}), NonFinite);
    EXPECT_THROW(fixed_point([](double x) { return x; }, std::numeric_limits<double>::quiet_NaN(), {}), DomainError);
}

TEST(FixedPointProperty, ContractionResidualMeetsTolerance) {
    for (double damping : {0.2, 0.5, 0.8, 1.0}) {
        for (double k : {-0.9, -0.3, 0.1, 0.6, 0.95}) {
            SolverOptions o;
            o.damping = damping;
            o.max_iter = 5000;
            auto g = [k](double x) { return k * x + 3.0; };
            const auto r = fixed_point(g, 0.0, o);
            ASSERT_TRUE(r.converged) << damping << " " << k;
            EXPECT_LE(std::abs(g(r.value) - r.value), o.abs_tol + o.rel_tol * std::abs(r.value));
            EXPECT_DOUBLE_EQ(r.residual, g(r.value) - r.value);
        }
    }
}

namespace {

SolverOptions nm_options(int max_iter = 2000) {
    SolverOptions o;
    o.max_iter = max_iter;
    return o;
}

}  // namespace

TEST(NelderMead, QuadraticMinimum) {
    auto f = [](std::span<const double> x) { return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] - 2.0) * (x[1] - 2.0); };
    const auto r = nelder_mead(f, {0.0, 0.0}, {}, nm_options());
    EXPECT_NEAR(r.x_best[0], 1.0, 1e-4);
    EXPECT_NEAR(r.x_best[1], 2.0, 1e-4);
}

TEST(NelderMead, ConstantObjectiveTerminates) {
    const auto r = nelder_mead([](std::span<const double>) { return 3.0; }, {0.5, 0.5}, {}, nm_options());
    EXPECT_EQ(r.f_best, 3.0);
    EXPECT_LT(r.iterations, 2000);
}

TEST(NelderMead, ClippedBoundaryMinimum) {
    auto f = [](std::span<const double> x) { return (x[0] - 5.0) * (x[0] - 5.0); };
    const auto r = nelder_mead(f, {0.5}, {{0.0, 1.0}}, nm_options());
    EXPECT_DOUBLE_EQ(r.x_best[0], 1.0);
}

TEST(NelderMead, NonFiniteStartThrows) {
    auto f = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
    EXPECT_THROW(nelder_mead(f, {0.0}, {}, nm_options()), NonFinite);
}

TEST(NelderMead, EvaluationsStayInsideBounds) {
    bool outside = false;
    auto f = [&](std::span<const double> x) {
        if (x[0] < -1.0 || x[0] > 2.0 || x[1] < 0.0 || x[1] > 0.5) outside = true;
        return std::pow(x[0] - 3.0, 2) + std::pow(x[1] + 1.0, 2);
    };
    const auto r = nelder_mead(f, {0.0, 0.25}, {{-1.0, 2.0}, {0.0, 0.5}}, nm_options(), 0.5);
    EXPECT_FALSE(outside);
    EXPECT_NEAR(r.x_best[0], 2.0, 1e-6);
    EXPECT_NEAR(r.x_best[1], 0.0, 1e-6);
}

TEST(NelderMeadProperty, TraceIsNonIncreasing) {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = nelder_mead(rosen, {-1.2, 1.0}, {}, nm_options(5000));
    ASSERT_FALSE(r.trace.empty());
    EXPECT_LE(r.trace.front(), rosen(std::vector<double>{-1.2, 1.0}));
    for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
    EXPECT_EQ(r.trace.back(), r.f_best);
    EXPECT_NEAR(r.x_best[0], 1.0, 1e-3);
    EXPECT_NEAR(r.x_best[1], 1.0, 2e-3);
}

TEST(NelderMeadProperty, Deterministic) {
    auto f = [](std::span<const double> x) { return std::sin(3.0 * x[0]) + x[0] * x[0] + std::abs(x[1] - 0.3); };
    const auto a = nelder_mead(f, {1.0, 1.0}, {{-2.0, 2.0}, {-2.0, 2.0}}, nm_options());
    const auto b = nelder_mead(f, {1.0, 1.0}, {{-2.0, 2.0}, {-2.0, 2.0}}, nm_options());
    EXPECT_EQ(a.x_best, b.x_best);
    EXPECT_EQ(a.trace, b.trace);
}
