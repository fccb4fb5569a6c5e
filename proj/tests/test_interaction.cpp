#include <gtest/gtest.h>

#include <algorithm>

#include "irrg/interaction.hpp"

using namespace irrg;

TEST(Epsilon, GammaMatchesDefinition) {
  const EpsilonModel m;
  EXPECT_DOUBLE_EQ(irrg::gamma(0.0), 0.0);
  EXPECT_DOUBLE_EQ(irrg::gamma(3.0), 3.0 * m.mu / (1.0 - 3.0 * m.mu));
  EXPECT_THROW(irrg::gamma(-1.0), ValidationError);
  EXPECT_THROW(irrg::gamma(2.0, EpsilonModel{0.5}), ValidationError);
}

TEST(Epsilon, PairToleranceScalesWithMagnitude) {
  const double e = pair_epsilon(4, 1.0, -3.0);
  EXPECT_DOUBLE_EQ(e, irrg::gamma(3.0) * 4.0);
  EXPECT_EQ(pair_epsilon(9, 0.0, 0.0), 0.0);
}

TEST(Epsilon, SignWithDeadZone) {
  EXPECT_EQ(sgn_eps(0.5, 1.0), 0);
  EXPECT_EQ(sgn_eps(-1.0, 1.0), 0);
  EXPECT_EQ(sgn_eps(1.5, 1.0), 1);
  EXPECT_EQ(sgn_eps(-2.0, 1.0), -1);
  EXPECT_THROW(sgn_eps(0.0, -1.0), ValidationError);
}

TEST(Epsilon, CompareFitnessHandlesPenalties) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(compare_fitness(inf, inf, 3), 0);
  EXPECT_EQ(compare_fitness(inf, 1.0, 3), 1);
  EXPECT_EQ(compare_fitness(1.0, inf, 3), -1);
  EXPECT_EQ(compare_fitness(1.0, 1.0 + 1e-17, 3), 0);
  EXPECT_EQ(compare_fitness(1.0, 2.0, 3), -1);
}

TEST(Samples, ColumnsArePermutedEvenGrids) {
  Rng rng(4);
  const Bounds b{{-3, 3}, {0, 10}};
  const auto s = build_sample_matrix(b, 7, rng);
  ASSERT_EQ(s.rows(), 7u);
  for (std::size_t j = 0; j < 2; ++j) {
    auto col = s.column(j);
    std::sort(col.begin(), col.end());
    const double step = b[j].width() / 6.0;
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(col[i], b[j].lo + step * static_cast<double>(i), 1e-12);
    EXPECT_EQ(col.back(), b[j].hi);
  }
  EXPECT_THROW(build_sample_matrix(b, 1, rng), ValidationError);
}

TEST(Ranking, StableAscending) {
  const Vector y{3.0, 1.0, 3.0, 0.5};
  EXPECT_EQ(rank_ascending(y).order, (std::vector<std::size_t>{3, 1, 0, 2}));
}

TEST(Cache, ReusesValuesAndFoldsNegativeZero) {
  const auto f = make_fixture("sum_squares2");
  CachedObjective c(f);
  EXPECT_DOUBLE_EQ(c(Vector{1, 2}), 5.0);
  EXPECT_DOUBLE_EQ(c(Vector{1, 2}), 5.0);
  c(Vector{0.0, 1.0});
  c(Vector{-0.0, 1.0});
  EXPECT_EQ(c.misses(), 2u);
  EXPECT_EQ(c.hits(), 2u);
  EXPECT_EQ(f.evaluations(), 2u);
}

TEST(Cache, LimitThrowsOnlyOnNewPoints) {
  const auto f = make_fixture("sum_squares2");
  CachedObjective c(f);
  c.set_limit(1);
  c(Vector{1, 1});
  EXPECT_NO_THROW(c(Vector{1, 1}));
  EXPECT_THROW(c(Vector{2, 1}), BudgetExhausted);
  EXPECT_EQ(f.evaluations(), 1u);
}

namespace {

// Context for the closed-form ranking example on (x1 + x2)^2 * x3 + x4.
struct RankingExample {
  ProblemInstance f = make_fixture("fbar_c3");
  SampleMatrix samples = SampleMatrix::from_rows({{-3, -3, -3, -3}, {0, 0, 0, 0}, {3, 3, 3, 3}});
  Vector x_hq{1, 1, 3, 2};
  Vector x2bar{1, 2, 3, 2};
};

}  // namespace

TEST(RankingExample, FirstRankingValues) {
  RankingExample ex;
  const auto first = create_first_ranking({0}, ex.x_hq, ex.samples, ex.f, 3);
  EXPECT_EQ(first.fitness, (Vector{14, 5, 50}));
  EXPECT_EQ(first.ranking.order, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(RankingExample, SecondContextInvertsOrder) {
  RankingExample ex;
  const auto first = create_first_ranking({0}, ex.x_hq, ex.samples, ex.f, 3);
  const auto check = check_interaction({0}, {1}, ex.x_hq, ex.samples, ex.x2bar, first, ex.f, 3);
  ASSERT_TRUE(check.interacting);
  ASSERT_TRUE(check.witness.has_value());
  EXPECT_EQ(check.witness->sample_better, 1u);
  EXPECT_EQ(check.witness->sample_worse, 0u);
  EXPECT_EQ(check.witness->y1_better, 5.0);
  EXPECT_EQ(check.witness->y1_worse, 14.0);
  EXPECT_EQ(check.witness->y2_better, 14.0);
  EXPECT_EQ(check.witness->y2_worse, 5.0);
  EXPECT_EQ(check.evaluations, 2u);
}

TEST(RankingExample, FullSecondRanking) {
  RankingExample ex;
  Vector probe = ex.x2bar;
  Vector y2;
  for (double v : {-3.0, 0.0, 3.0}) {
    probe[0] = v;
    y2.push_back(ex.f.evaluate(probe));
  }
  EXPECT_EQ(y2, (Vector{5, 14, 77}));
  EXPECT_EQ(rank_ascending(y2).order, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(RankingExample, AdditiveVariableShowsNoInteraction) {
  RankingExample ex;
  Vector x2bar = ex.x_hq;
  x2bar[3] = -3;
  const auto first = create_first_ranking({0}, ex.x_hq, ex.samples, ex.f, 3);
  EXPECT_FALSE(is_interaction({0}, {3}, ex.x_hq, ex.samples, x2bar, first, ex.f, 3));
}

TEST(InteractionCheck, RejectsBadSets) {
  RankingExample ex;
  const auto first = create_first_ranking({0}, ex.x_hq, ex.samples, ex.f, 3);
  EXPECT_THROW(check_interaction({0}, {0, 1}, ex.x_hq, ex.samples, ex.x2bar, first, ex.f, 3), ValidationError);
  EXPECT_THROW(check_interaction({0}, {}, ex.x_hq, ex.samples, ex.x2bar, first, ex.f, 3), ValidationError);
  EXPECT_THROW(check_interaction({0}, {7}, ex.x_hq, ex.samples, ex.x2bar, first, ex.f, 3), ValidationError);
  EXPECT_THROW(create_first_ranking({}, ex.x_hq, ex.samples, ex.f, 3), ValidationError);
}

TEST(InteractionCheck, AdditiveFunctionsNeverLink) {
  // Sum of arbitrary one-variable terms: rankings of X1 can never invert
  // when only X2 changes.
  ProblemInstance f("additive", uniform_bounds(6, -4, 4), [](std::span<const double> x) {
    return std::sin(3 * x[0]) * 1e3 + x[1] * x[1] * x[1] + std::exp(x[2]) + std::abs(x[3]) * 1e-3 +
           std::cos(x[4]) * 1e8 + x[5];
  });
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto samples = build_sample_matrix(f.bounds(), 10, rng);
    VarSet perm = iota_set(6);
    shuffle_in_place(perm, rng);
    const std::size_t k = 1 + uniform_index(rng, 4);
    VarSet x1(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
    VarSet x2(perm.begin() + static_cast<std::ptrdiff_t>(k), perm.end());
    const Vector x = random_point(f.bounds(), rng);
    const Vector x2bar = random_point(f.bounds(), rng);
    const auto first = create_first_ranking(x1, x, samples, f, 10);
    ASSERT_FALSE(is_interaction(x1, x2, x, samples, x2bar, first, f, 10)) << "trial " << trial;
  }
}

TEST(InteractionCheck, WitnessIsADecisiveInversion) {
  const auto f = make_fixture("product2");
  Rng rng(3);
  int found = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto samples = build_sample_matrix(f.bounds(), 5, rng);
    const Vector x = random_point(f.bounds(), rng);
    const Vector x2bar = random_point(f.bounds(), rng);
    const auto first = create_first_ranking({0}, x, samples, f, 5);
    const auto c = check_interaction({0}, {1}, x, samples, x2bar, first, f, 5);
    if (!c.interacting) continue;
    ++found;
    const auto& w = *c.witness;
    EXPECT_LT(compare_fitness(w.y1_better, w.y1_worse, 2), 0);
    EXPECT_LT(compare_fitness(w.y2_worse, w.y2_better, 2), 0);
    Vector p = x2bar;
    p[0] = samples(w.sample_worse, 0);
    EXPECT_EQ(f.evaluate(p), w.y2_worse);
  }
  // x1 * x2 flips whenever x2 changes sign between contexts.
  EXPECT_GT(found, 50);
}
