#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "catbbm/estimators.hpp"
#include "catbbm/oracles.hpp"

using namespace catbbm;
using namespace catbbm::estimators;

TEST(SampleMoments, KnownValues) {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    const auto m = SampleMoments::of(xs);
    EXPECT_EQ(m.n, 4u);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.std_error, std::sqrt(5.0 / 12.0));
}

TEST(Ecdf, StepsAndLeftLimits) {
    const Ecdf f({3.0, 1.0, 2.0, 2.0});
    EXPECT_EQ(f(0.5), 0.0);
    EXPECT_EQ(f(2.0), 0.75);
    EXPECT_EQ(f.left_limit(2.0), 0.25);
    EXPECT_EQ(f(3.0), 1.0);
    EXPECT_THROW(Ecdf(std::vector<double>{}), std::invalid_argument);
}

TEST(KsDistance, UsesBothSidesOfEachJump) {
    // One sample at 0.5 against U(0,1): sup is 0.5 on either side.
    const auto ks = ks_distance(Ecdf({0.5}), [](double x) { return std::clamp(x, 0.0, 1.0); });
    EXPECT_DOUBLE_EQ(ks.statistic, 0.5);
    // Evenly spaced midpoints: D = 1/(2n).
    std::vector<double> xs;
    for (int i = 0; i < 10; ++i) xs.push_back((i + 0.5) / 10.0);
    EXPECT_NEAR(ks_distance(Ecdf(xs), [](double x) { return std::clamp(x, 0.0, 1.0); }).statistic, 0.05, 1e-15);
}

TEST(KsDistance, RangeRestriction) {
    std::vector<double> xs = {-5.0, 0.1, 0.2, 0.3, 0.4, 5.0};
    auto cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    const auto full = ks_distance(Ecdf(xs), cdf);
    const auto inner = ks_distance(Ecdf(xs), cdf, Range{0.0, 0.45});
    EXPECT_LE(inner.statistic, full.statistic);
    EXPECT_EQ(inner.n_effective, xs.size());
}

TEST(KsDistance, TwoSample) {
    const Ecdf a({1.0, 2.0, 3.0}), b({1.0, 2.0, 3.0}), c({10.0, 11.0});
    EXPECT_EQ(ks_distance(a, b).statistic, 0.0);
    EXPECT_EQ(ks_distance(a, c).statistic, 1.0);
    EXPECT_EQ(ks_distance(a, c).n_effective, 1u);  // 3*2/5 rounded down
}

TEST(KsPvalue, KolmogorovQuantiles) {
    auto p = [](double lambda) { return ks_pvalue({lambda / 100.0, 10000}); };
    EXPECT_NEAR(p(1.62762), 0.01, 1e-5);
    EXPECT_NEAR(p(1.35810), 0.05, 1e-5);
    EXPECT_NEAR(p(0.0), 1.0, 1e-12);
    EXPECT_LT(p(5.0), 1e-20);
}

TEST(MixtureGrid, ParallelMatchesSerialAndPointwise) {
    std::vector<double> ys, ms;
    for (int i = 0; i < 37; ++i) ys.push_back(-2.0 + 0.17 * i);
    for (int i = 0; i < 500; ++i) ms.push_back(0.01 + 0.013 * i);
    const auto a = mixture_cdf_grid(0.7, ys, ms);
    const auto b = mixture_cdf_grid_serial(0.7, ys, ms);
    EXPECT_EQ(a, b);
    for (std::size_t i = 0; i < ys.size(); ++i) {
        EXPECT_NEAR(a[i], oracles::gumbel_mixture_cdf(0.7, ys[i], ms), 1e-14);
        if (i > 0) EXPECT_GE(a[i], a[i - 1]);
    }
}

namespace {

EnsembleResult origin_ensemble(std::uint64_t n, double beta, double t, std::vector<double> times = {}) {
    EnsembleSpec s;
    s.params = {beta, 0.0, t};
    s.n_runs = n;
    s.snapshot_times = std::move(times);
    s.level_offsets = {0.0, 1.0};
    s.base_seed = 99;
    return run_ensemble(s);
}

}  // namespace

TEST(CountMoments, FirstMomentNearOracle) {
    const auto runs = origin_ensemble(10000, 1.0, 4.0);
    const auto m = count_moments(runs, 4.0, 0.0, 0);
    EXPECT_NEAR(m.first.mean, oracles::expected_count({1.0, 0.0, 4.0}, 2.0).value, 4.0 * m.first.std_error);
    EXPECT_GE(m.second.mean, m.first.mean);
    EXPECT_LE(m.survival, m.first.mean);  // Markov
    EXPECT_THROW(count_moments(EnsembleResult{}, 4.0, 0.0, 0), std::invalid_argument);
}

TEST(Theorem1, ReportShape) {
    const auto runs = origin_ensemble(2000, 1.0, 8.0);
    const std::vector<double> grid = {-1.0, 0.0, 1.0, 2.0};
    const auto r = theorem1_from_runs(runs, 1.0, 8.0, 1.6, grid);
    ASSERT_EQ(r.rows.size(), grid.size());
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        EXPECT_GE(r.rows[i].ecdf_value, r.rows[i - 1].ecdf_value);
        EXPECT_GE(r.rows[i].mixture_value, r.rows[i - 1].mixture_value);
    }
    EXPECT_LT(r.ks.statistic, 0.2);
    EXPECT_THROW(theorem1_from_runs(runs, 1.0, 8.0, 8.0, grid), std::invalid_argument);
    EXPECT_THROW(theorem1_from_runs(runs, 1.0, 8.0, 1.6, std::vector<double>{}), std::invalid_argument);
}

TEST(Prop6, RespectsMarkovLowerBound) {
    // P(R_t <= lambda) >= 1 - E|N_t^lambda| is a rigorous lower bound.
    const double beta = 0.3, t = 40.0, z = 2.0;
    const auto runs = origin_ensemble(3000, beta, t);
    const auto r = prop6_from_runs(runs, beta, 0.0, t, z);
    const double markov = 1.0 - oracles::expected_count({beta, 0.0, t}, beta * t / 2 + z).value;
    const double se = std::sqrt(r.empirical * (1 - r.empirical) / r.n);
    EXPECT_GE(r.empirical, markov - 4.0 * se);
    EXPECT_EQ(r.predicted, oracles::prop6_estimate(beta, 0.0, z));
}

TEST(MartingaleReport, MeanOneAndShrinkingIncrements) {
    const auto runs = origin_ensemble(4000, 1.0, 10.0, {1.0, 2.0, 5.0});
    const auto r = martingale_convergence_report(runs, {1.0, 0.0, 10.0}, std::vector<double>{1.0, 2.0, 5.0});
    EXPECT_NEAR(r.m_t.mean, 1.0, 4.0 * r.m_t.std_error);
    EXPECT_GT(r.min_m_t, 0.0);
    EXPECT_NEAR(r.limit_variance, 2.0 * (1.0 + std::sqrt(2.0)) - 1.0, 1e-8);
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        EXPECT_LT(r.rows[i].mean_abs_increment, r.rows[i - 1].mean_abs_increment);
    EXPECT_THROW(martingale_convergence_report(runs, {1.0, 0.0, 10.0}, std::vector<double>{10.0}), std::invalid_argument);
}
