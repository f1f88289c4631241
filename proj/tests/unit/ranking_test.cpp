#include "dungeon/error.hpp"
#include "dungeon/grid.hpp"
#include "dungeon/metrics.hpp"
#include "dungeon/ranking.hpp"
#include "dungeon/rng.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace dungeon;

namespace {

FitnessVector random_fitness(Rng& rng, std::size_t n, bool feasible = true)
{
    std::vector<double> v(n);
    for (auto& x : v) {
        // coarse values so ties occur
        x = static_cast<double>(rng.index(5)) / 4.0;
    }
    return {v, feasible};
}

} // namespace

TEST(Ranking, ExemplarAgainstItselfIsZero)
{
    Rng rng(1);
    for (int n = 0; n < 20; ++n) {
        const auto m = compute_metrics(random_feasible_map(rng));
        TargetSet t{{m}};
        const auto f = fitness(m, t, true);
        ASSERT_EQ(f.size(), 31u);
        for (double x : f.values()) {
            EXPECT_EQ(x, 0.0);
        }
    }
}

TEST(Ranking, FitnessMatchesMinOverExemplarsOracle)
{
    Rng rng(2);
    std::vector<MetricVector> ex;
    for (int k = 0; k < 3; ++k) {
        ex.push_back(compute_metrics(random_feasible_map(rng)));
    }
    const TargetSet t{ex};
    for (int n = 0; n < 100; ++n) {
        const GridMap m = random_map(rng);
        FeasibilityReport rep;
        const auto mv = compute_metrics_any(m, &rep);
        const auto f = fitness(mv, t, rep.feasible);
        const auto want = oracle::fitness(mv, ex, rep.feasible);
        ASSERT_EQ(f.size(), want.size());
        EXPECT_EQ(f.size(), rep.feasible ? 31u : 30u);
        for (std::size_t k = 0; k < want.size(); ++k) {
            EXPECT_NEAR(f[k], want[k], 1e-12);
        }
    }
}

TEST(Ranking, InfeasibleVectorsSkipMOne)
{
    MetricVector a;
    MetricVector b;
    for (int i = 1; i <= kMetricCount; ++i) {
        a(i) = i;
        b(i) = 2 * i;
    }
    const auto f = fitness(a, TargetSet{{b}}, false);
    EXPECT_EQ(f.first_metric(), 2);
    EXPECT_EQ(f.size(), 30u);
    EXPECT_EQ(f.metric(2), 2.0);
    EXPECT_EQ(f.metric(31), 31.0);
    EXPECT_TRUE(std::isnan(f.metric(1)));
}

TEST(Ranking, EmptyTargetSetThrows)
{
    try {
        fitness(MetricVector{}, TargetSet{}, true);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyTargetSet);
    }
}

TEST(Ranking, MismatchedIndexSetsThrow)
{
    const FitnessVector a(std::vector<double>(31, 0.0), true);
    const FitnessVector b(std::vector<double>(30, 0.0), false);
    try {
        majority_prefers(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IndexSetMismatch);
    }
    EXPECT_THROW(dominates(a, b), Error);
}

TEST(Ranking, MajorityVoteExamples)
{
    const FitnessVector a({0, 0, 1}, true);
    const FitnessVector b({1, 1, 0}, true);
    EXPECT_EQ(majority_prefers(a, b), Preference::Better);
    EXPECT_EQ(majority_prefers(b, a), Preference::Worse);
    // equal objectives abstain
    const FitnessVector c({0, 5, 5}, true);
    const FitnessVector d({1, 5, 5}, true);
    EXPECT_EQ(majority_prefers(c, d), Preference::Better);
    const FitnessVector e({0, 1, 5}, true);
    const FitnessVector f({1, 0, 5}, true);
    EXPECT_EQ(majority_prefers(e, f), Preference::Tie);
    EXPECT_EQ(majority_prefers(e, e), Preference::Tie);
}

TEST(Ranking, MajorityVoteIsAntisymmetric)
{
    Rng rng(3);
    for (int n = 0; n < 2000; ++n) {
        const auto a = random_fitness(rng, 31);
        const auto b = random_fitness(rng, 31);
        const auto ab = majority_prefers(a, b);
        const auto ba = majority_prefers(b, a);
        if (ab == Preference::Better) {
            EXPECT_EQ(ba, Preference::Worse);
        } else if (ab == Preference::Worse) {
            EXPECT_EQ(ba, Preference::Better);
        } else {
            EXPECT_EQ(ba, Preference::Tie);
        }
    }
}

TEST(Ranking, DominanceImpliesMajorityAndRank)
{
    Rng rng(4);
    for (int n = 0; n < 1000; ++n) {
        const auto b = random_fitness(rng, 31);
        std::vector<double> av = b.values();
        // improve at least one objective, never worsen any
        const auto k = rng.index(31);
        av[k] -= 0.5;
        for (auto& x : av) {
            if (rng.coin()) {
                x -= rng.uniform();
            }
        }
        const FitnessVector a(av, true);
        ASSERT_TRUE(dominates(a, b));
        ASSERT_FALSE(dominates(b, a));
        EXPECT_EQ(majority_prefers(a, b), Preference::Better);
        const std::vector<FitnessVector> pop{b, a};
        const auto order = copeland_rank(pop);
        EXPECT_EQ(order.front(), 1u);
    }
}

TEST(Ranking, DominanceDefinition)
{
    const FitnessVector a({0, 1, 2}, true);
    const FitnessVector b({0, 1, 3}, true);
    EXPECT_TRUE(dominates(a, b));
    EXPECT_FALSE(dominates(b, a));
    EXPECT_FALSE(dominates(a, a));
}

TEST(Ranking, CopelandMatchesAllPairsOracle)
{
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<FitnessVector> pop;
        std::vector<std::vector<double>> raw;
        const std::size_t n = 2 + rng.index(25);
        for (std::size_t i = 0; i < n; ++i) {
            pop.push_back(random_fitness(rng, 30, false));
            raw.push_back(pop.back().values());
        }
        EXPECT_EQ(copeland_scores(pop), oracle::copeland(raw));
    }
}

TEST(Ranking, CopelandRankTieBreaks)
{
    // identical vectors: adjacent, input order kept
    const FitnessVector x({1, 1, 1}, true);
    const FitnessVector y({0, 0, 0}, true);
    std::vector<FitnessVector> pop{x, y, x};
    EXPECT_EQ(copeland_rank(pop), (std::vector<std::size_t>{1, 0, 2}));

    // equal Copeland score, lower sum first
    const FitnessVector p({0, 9, 2}, true);
    const FitnessVector q({1, 0, 2}, true);
    std::vector<FitnessVector> pq{p, q};
    ASSERT_EQ(majority_prefers(p, q), Preference::Tie);
    EXPECT_EQ(copeland_rank(pq), (std::vector<std::size_t>{1, 0}));
}

TEST(Ranking, DominatorRanksAboveDominatedInLargerPopulations)
{
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<FitnessVector> pop;
        for (int i = 0; i < 15; ++i) {
            pop.push_back(random_fitness(rng, 4));
        }
        const auto order = copeland_rank(pop);
        std::vector<std::size_t> pos(pop.size());
        for (std::size_t r = 0; r < order.size(); ++r) {
            pos[order[r]] = r;
        }
        const auto score = copeland_scores(pop);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            for (std::size_t j = 0; j < pop.size(); ++j) {
                if (dominates(pop[i], pop[j])) {
                    // the dominator fares at least as well against every third map
                    EXPECT_GT(score[i], score[j]);
                    EXPECT_LT(pos[i], pos[j]);
                }
            }
        }
    }
}
