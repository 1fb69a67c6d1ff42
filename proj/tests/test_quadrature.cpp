#include <gtest/gtest.h>

#include <cmath>

#include "catbbm/quadrature.hpp"

using namespace catbbm;

TEST(Integrate, ExactForLowDegreePolynomials) {
    // The Kronrod rule integrates degree 22 exactly on a single panel.
    const auto r = integrate([](double x) { return std::pow(x, 20) - 3 * std::pow(x, 7) + 1; }, -1.0, 2.0);
    const double exact = (std::pow(2.0, 21) + 1.0) / 21.0 - 3.0 * (256.0 - 1.0) / 8.0 + 3.0;
    EXPECT_NEAR(r.value, exact, 1e-9 * exact);
}

TEST(Integrate, EndpointSingularity) {
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 4.0);
    EXPECT_NEAR(r.value, 4.0, 1e-8);
    EXPECT_LT(r.abs_error, 1e-8);
}

TEST(Integrate, ReversedAndEmptyIntervals) {
    auto f = [](double x) { return std::exp(x); };
    EXPECT_NEAR(integrate(f, 1.0, 0.0).value, -(std::exp(1.0) - 1.0), 1e-13);
    EXPECT_EQ(integrate(f, 2.0, 2.0).value, 0.0);
}

TEST(Integrate, ErrorEstimateCoversTheTruth) {
    for (double k : {1.0, 10.0, 50.0}) {
        const auto r = integrate([&](double x) { return std::cos(k * x); }, 0.0, 3.0);
        EXPECT_LE(std::fabs(r.value - std::sin(3.0 * k) / k), std::max(r.abs_error, 1e-12)) << k;
    }
}

TEST(Integrate, ThrowsWhenBudgetIsExhausted) {
    QuadratureOptions o;
    o.max_intervals = 3;
    o.abs_tol = 1e-15;
    o.rel_tol = 0.0;
    EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, o), QuadratureError);
}

TEST(IntegrateToInfinity, KnownTails) {
    EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0, 1.0).value, 1.0, 1e-12);
    EXPECT_NEAR(integrate_to_infinity([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0).value, M_PI / 2, 1e-7);
    EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x * x / 2); }, -10.0, 1.0).value,
                std::sqrt(2 * M_PI), 1e-10);
}
