#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "catbbm/estimators.hpp"
#include "catbbm/quadrature.hpp"
#include "catbbm/sampling.hpp"
#include "catbbm/special_functions.hpp"

using namespace catbbm;
using namespace catbbm::kernels;
using estimators::Ecdf;

namespace {

constexpr double kCritical = 1.62762;  // 1% Kolmogorov critical value of sqrt(n) D

template <class Draw>
std::vector<double> draws(std::size_t n, std::uint64_t seed, Draw draw) {
    RngStream rng(seed, 0);
    std::vector<double> xs(n);
    for (double& x : xs) x = draw(rng);
    return xs;
}

double scaled_ks(const std::vector<double>& xs, const std::function<double(double)>& cdf) {
    const auto ks = estimators::ks_distance(Ecdf(xs), cdf);
    return std::sqrt(static_cast<double>(ks.n_effective)) * ks.statistic;
}

}  // namespace

// Random parameter draws: each sampler agrees with its CDF.
TEST(Samplers, AgreeWithClosedFormsAtRandomParameters) {
    RngStream params(2024, 99);
    for (int trial = 0; trial < 6; ++trial) {
        const double x0 = params.uniform_open(-3.0, 3.0);
        const double delta = params.uniform_open(0.05, 5.0);
        const double budget = params.uniform_open(0.05, 4.0);
        const std::uint64_t seed = 100 + static_cast<std::uint64_t>(trial);
        const std::size_t n = 20000;
        EXPECT_LT(scaled_ks(draws(n, seed, [&](RngStream& r) { return sample_first_passage_truncated(x0, delta, r); }),
                            [&](double s) { return first_passage_truncated_cdf(x0, delta, s); }),
                  kCritical)
            << x0 << " " << delta;
        EXPECT_LT(scaled_ks(draws(n, seed, [&](RngStream& r) { return sample_position_given_alive(delta, budget, r).x; }),
                            [&](double x) { return position_given_alive_cdf(delta, budget, x); }),
                  kCritical)
            << delta << " " << budget;
        EXPECT_LT(scaled_ks(draws(n, seed, [&](RngStream& r) { return sample_position_given_alive(delta, budget, r).l; }),
                            [&](double l) { return local_time_given_alive_cdf(delta, budget, l); }),
                  kCritical);
        EXPECT_LT(scaled_ks(draws(n, seed, [&](RngStream& r) { return sample_position_no_hit(x0, delta, r); }),
                            [&](double w) { return position_no_hit_cdf(x0, delta, w); }),
                  kCritical)
            << x0 << " " << delta;
    }
}

TEST(FirstPassage, SignSymmetry) {
    const auto a = draws(20000, 1, [](RngStream& r) { return sample_first_passage(1.3, r); });
    const auto b = draws(20000, 2, [](RngStream& r) { return sample_first_passage(-1.3, r); });
    const auto ks = estimators::ks_distance(Ecdf(a), Ecdf(b));
    EXPECT_LT(std::sqrt(double(ks.n_effective)) * ks.statistic, kCritical);
}

TEST(FirstPassage, LaplaceTransform) {
    // E exp(-beta^2 tau / 2) = exp(-beta |x0|)
    const double beta = 0.7, x0 = 1.5;
    const auto xs = draws(100000, 3, [&](RngStream& r) { return sample_first_passage(x0, r); });
    std::vector<double> v;
    for (double tau : xs) v.push_back(std::exp(-beta * beta * tau / 2.0));
    const auto m = estimators::SampleMoments::of(v);
    EXPECT_NEAR(m.mean, std::exp(-beta * std::fabs(x0)), 4.0 * m.std_error);
}

TEST(FirstPassage, ZeroStartAndDensityConsistency) {
    RngStream r(4, 0);
    EXPECT_EQ(sample_first_passage(0.0, r), 0.0);
    for (double x0 : {0.3, 1.0, -2.5}) {
        for (double s : {0.1, 1.0, 7.0}) {
            const auto F = integrate([&](double u) { return first_passage_pdf(x0, u); }, 0.0, s);
            EXPECT_NEAR(F.value, first_passage_cdf(x0, s), 1e-9);
        }
    }
}

TEST(FirstPassageTruncated, MeanMatchesQuadrature) {
    const double x0 = 0.8, tmax = 2.0;
    const double mass = first_passage_cdf(x0, tmax);
    const double mean = integrate([&](double s) { return s * first_passage_pdf(x0, s); }, 0.0, tmax).value / mass;
    const auto xs = draws(100000, 5, [&](RngStream& r) { return sample_first_passage_truncated(x0, tmax, r); });
    const auto m = estimators::SampleMoments::of(xs);
    EXPECT_NEAR(m.mean, mean, 4.0 * m.std_error);
    for (double s : xs) ASSERT_LE(s, tmax);
}

TEST(FirstPassageTruncated, RejectsInvalidArguments) {
    RngStream r(6, 0);
    EXPECT_THROW(sample_first_passage_truncated(0.0, 1.0, r), std::invalid_argument);
    EXPECT_THROW(sample_first_passage_truncated(1.0, 0.0, r), std::invalid_argument);
    EXPECT_THROW(sample_first_passage_truncated(1.0, -1.0, r), std::invalid_argument);
}

TEST(FirstPassageTruncated, TinyHitProbabilityStaysFinite) {
    RngStream r(7, 0);
    for (int i = 0; i < 1000; ++i) {
        const double s = sample_first_passage_truncated(10.0, 0.5, r);
        ASSERT_TRUE(std::isfinite(s));
        ASSERT_GT(s, 0.0);
        ASSERT_LE(s, 0.5);
    }
}

TEST(InverseLocalTime, SameLawAsFirstPassageFromLevel) {
    const auto a = draws(20000, 8, [](RngStream& r) { return sample_inverse_local_time(0.9, r); });
    const auto b = draws(20000, 9, [](RngStream& r) { return sample_first_passage(0.9, r); });
    const auto ks = estimators::ks_distance(Ecdf(a), Ecdf(b));
    EXPECT_LT(std::sqrt(double(ks.n_effective)) * ks.statistic, kCritical);
}

TEST(BranchBudget, ExponentialMean) {
    for (double beta : {0.3, 1.0, 4.0}) {
        const auto xs = draws(50000, 10, [&](RngStream& r) { return sample_branch_budget(beta, r); });
        const auto m = estimators::SampleMoments::of(xs);
        EXPECT_NEAR(m.mean, 1.0 / beta, 4.0 * m.std_error);
    }
    RngStream r(10, 1);
    EXPECT_THROW(sample_branch_budget(0.0, r), std::invalid_argument);
}

TEST(PositionGivenAlive, RespectsBudgetAndSymmetry) {
    RngStream r(11, 0);
    int positive = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_position_given_alive(0.5, 0.2, r);
        ASSERT_GE(s.l, 0.0);
        ASSERT_LT(s.l, 0.2);
        positive += s.x > 0;
    }
    EXPECT_NEAR(positive, n / 2, 5 * std::sqrt(n / 4.0));
}

TEST(PositionGivenAlive, InfiniteBudgetIsTheFreeJointLaw) {
    // Without conditioning, |X_t| + L_t is Rayleigh and L_t is |N(0, t)|.
    const double t = 2.0;
    const auto l = draws(20000, 12, [&](RngStream& r) { return sample_position_given_alive(t, INFINITY, r).l; });
    EXPECT_LT(scaled_ks(l, [&](double v) { return v <= 0 ? 0.0 : 2.0 * normal_cdf(v / std::sqrt(t)) - 1.0; }),
              kCritical);
}

TEST(JointDensity, IntegratesToSurvivalProbability) {
    const double t = 1.3;
    for (double b : {0.2, 1.0, HUGE_VAL}) {
        auto inner = [&](double l) {
            return 2.0 * integrate_to_infinity([&](double x) { return joint_position_local_time_pdf(t, x, l); }, 0.0, 1.0)
                             .value;
        };
        const double mass = std::isinf(b) ? integrate_to_infinity(inner, 0.0, 1.0).value : integrate(inner, 0.0, b).value;
        EXPECT_NEAR(mass, survival_probability(t, b), 1e-8) << b;
    }
}

TEST(PositionNoHit, StaysOnStartingSide) {
    RngStream r(13, 0);
    for (int i = 0; i < 10000; ++i) {
        ASSERT_GT(sample_position_no_hit(0.4, 1.0, r), 0.0);
        ASSERT_LT(sample_position_no_hit(-0.4, 1.0, r), 0.0);
    }
    EXPECT_THROW(sample_position_no_hit(0.0, 1.0, r), std::invalid_argument);
    EXPECT_THROW(sample_position_no_hit(1.0, 0.0, r), std::invalid_argument);
}

TEST(PositionNoHit, ProbabilityComplementsFirstPassage) {
    for (double x0 : {0.1, 1.0, -3.0})
        for (double d : {0.01, 1.0, 10.0}) EXPECT_NEAR(no_hit_probability(x0, d), 1.0 - first_passage_cdf(x0, d), 1e-14);
}
