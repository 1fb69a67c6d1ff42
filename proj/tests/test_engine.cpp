#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "catbbm/engine.hpp"
#include "catbbm/estimators.hpp"
#include "catbbm/oracles.hpp"
#include "catbbm/special_functions.hpp"

using namespace catbbm;

namespace {

std::vector<double> rightmost_at_horizon(const ModelParams& p, std::vector<double> times, std::uint64_t seed, int n) {
    times.push_back(p.t);
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        out.push_back(simulate_run(p, times, rng).back().rightmost);
    }
    return out;
}

}  // namespace

TEST(Engine, GenealogyInvariants) {
    const ModelParams p{1.0, 0.7, 6.0};
    const std::vector<double> times = {1.0, 3.0, 6.0};
    EngineOptions o;
    o.record_genealogy = true;
    for (std::uint64_t run = 0; run < 50; ++run) {
        RngStream rng(77, run);
        const RunRecord rec = simulate_run_recorded(p, times, rng, o);
        ASSERT_EQ(rec.genealogy.size(), rec.lifetimes);
        ASSERT_FALSE(rec.genealogy[0].parent_id.has_value());
        EXPECT_EQ(rec.genealogy[0].birth_position, 0.7);
        std::map<std::uint64_t, int> children;
        std::size_t alive = 0;
        for (const Particle& q : rec.genealogy) {
            ASSERT_EQ(rec.genealogy[q.id].id, q.id);
            if (q.parent_id) {
                const Particle& parent = rec.genealogy[*q.parent_id];
                ASSERT_TRUE(parent.branched_at.has_value());
                EXPECT_EQ(*parent.branched_at, q.birth_time);
                EXPECT_EQ(q.birth_position, 0.0);
                ++children[*q.parent_id];
            }
            if (q.branched_at) {
                EXPECT_GE(*q.branched_at, q.birth_time);
                EXPECT_LE(*q.branched_at, p.t);
            }
            EXPECT_GT(q.budget, 0.0);
            alive += q.alive_at_horizon();
        }
        for (const auto& [id, k] : children) EXPECT_EQ(k, 2) << id;
        EXPECT_EQ(alive, rec.snapshots.back().size());
        EXPECT_EQ(rec.lifetimes, 2 * children.size() + 1);
    }
}

TEST(Engine, SnapshotSummariesAgreeWithPositions) {
    const ModelParams p{1.0, 0.0, 5.0};
    RngStream rng(3, 0);
    const auto snaps = simulate_run(p, std::vector<double>{0.0, 2.0, 5.0}, rng);
    ASSERT_EQ(snaps.size(), 3u);
    EXPECT_EQ(snaps[0].size(), 1u);
    EXPECT_DOUBLE_EQ(snaps[0].martingale, 1.0);
    for (const Snapshot& s : snaps) {
        EXPECT_EQ(s.rightmost, *std::max_element(s.positions.begin(), s.positions.end()));
        double w = 0.0;
        for (double x : s.positions) w += std::exp(-std::fabs(x));
        EXPECT_NEAR(s.martingale, std::exp(-s.t / 2.0) * w, 1e-12 * s.martingale);
        EXPECT_EQ(s.count_above(s.rightmost), std::count(s.positions.begin(), s.positions.end(), s.rightmost));
        EXPECT_EQ(s.count_above(-INFINITY), s.size());
    }
}

TEST(Engine, VanishingRateIsPlainBrownianMotion) {
    const ModelParams p{1e-12, -0.4, 2.0};
    std::vector<double> xs;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        RngStream rng(5, i);
        const auto snaps = simulate_run(p, std::vector<double>{0.5, 2.0}, rng);
        ASSERT_EQ(snaps.back().size(), 1u);
        xs.push_back(snaps.back().positions[0]);
    }
    const auto ks = estimators::ks_distance(estimators::Ecdf(xs),
                                            [&](double x) { return normal_cdf((x - p.x0) / std::sqrt(p.t)); });
    EXPECT_LT(std::sqrt(double(ks.n_effective)) * ks.statistic, 1.62762);
}

TEST(Engine, MeanPopulationMatchesOracle) {
    const ModelParams p{1.0, 0.0, 1.0};
    std::vector<double> sizes;
    for (std::uint64_t i = 0; i < 40000; ++i) {
        RngStream rng(6, i);
        sizes.push_back(static_cast<double>(simulate_run(p, std::vector<double>{1.0}, rng).back().size()));
    }
    const auto m = estimators::SampleMoments::of(sizes);
    EXPECT_NEAR(m.mean, oracles::expected_population(p).value, 4.0 * m.std_error);
}

TEST(Engine, IntermediateSnapshotsDoNotChangeTheLaw) {
    const ModelParams p{1.0, 0.0, 4.0};
    const auto plain = rightmost_at_horizon(p, {}, 8, 8000);
    const auto dense = rightmost_at_horizon(p, {0.3, 0.9, 1.7, 2.2, 3.1, 3.9}, 9, 8000);
    const auto ks = estimators::ks_distance(estimators::Ecdf(plain), estimators::Ecdf(dense));
    EXPECT_LT(std::sqrt(double(ks.n_effective)) * ks.statistic, 1.62762);
}

TEST(Engine, DeterministicForAFixedStream) {
    const ModelParams p{1.5, 0.2, 3.0};
    const std::vector<double> times = {1.0, 3.0};
    RngStream a(10, 4), b(10, 4);
    const auto x = simulate_run(p, times, a);
    const auto y = simulate_run(p, times, b);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(x[i].positions, y[i].positions);
}

TEST(Engine, PopulationCap) {
    EngineOptions o;
    o.population_cap = 50;
    bool hit = false;
    for (std::uint64_t i = 0; i < 20 && !hit; ++i) {
        RngStream rng(11, i);
        try {
            simulate_run({2.0, 0.0, 10.0}, std::vector<double>{10.0}, rng, o);
        } catch (const PopulationCapExceeded& e) {
            EXPECT_EQ(e.cap(), 50u);
            hit = true;
        }
    }
    EXPECT_TRUE(hit);
}

TEST(Engine, RejectsBadObservationTimes) {
    RngStream rng(12, 0);
    const ModelParams p{1.0, 0.0, 2.0};
    EXPECT_THROW(simulate_run(p, std::vector<double>{1.0, 0.5}, rng), std::invalid_argument);
    EXPECT_THROW(simulate_run(p, std::vector<double>{3.0}, rng), std::invalid_argument);
    EXPECT_THROW(simulate_run(p, std::vector<double>{-0.1}, rng), std::invalid_argument);
    EXPECT_THROW(simulate_run({0.0, 0.0, 2.0}, std::vector<double>{1.0}, rng), std::invalid_argument);
}
