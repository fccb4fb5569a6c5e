#include <gtest/gtest.h>

#include "irrg/metrics.hpp"

using namespace irrg;

namespace {

InteractionMatrix random_matrix(std::size_t n, double p, Rng& rng) {
  auto m = InteractionMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) m.link(i, j);
  return m;
}

// Direct evaluation over all ordered off-diagonal pairs; each unordered pair
// is seen twice, so the ratios are unchanged.
AccuracyScores brute_force(const InteractionMatrix& e, const InteractionMatrix& t) {
  double tp = 0, pos = 0, tn = 0, neg = 0, same = 0, all = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (i == j) continue;
      all += 1;
      if (e(i, j) == t(i, j)) same += 1;
      if (t(i, j)) {
        pos += 1;
        if (e(i, j)) tp += 1;
      } else {
        neg += 1;
        if (!e(i, j)) tn += 1;
      }
    }
  AccuracyScores s;
  if (pos > 0) s.rho1 = 100 * tp / pos;
  if (neg > 0) s.rho2 = 100 * tn / neg;
  s.rho3 = all > 0 ? 100 * same / all : 100;
  return s;
}

InteractionMatrix permuted(const InteractionMatrix& m, const VarSet& perm) {
  auto out = InteractionMatrix::identity(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (m(i, j)) out.link(perm[i], perm[j]);
  return out;
}

void expect_same(const AccuracyScores& a, const AccuracyScores& b) {
  ASSERT_EQ(a.rho1.has_value(), b.rho1.has_value());
  ASSERT_EQ(a.rho2.has_value(), b.rho2.has_value());
  if (a.rho1) { EXPECT_NEAR(*a.rho1, *b.rho1, 1e-9); }
  if (a.rho2) { EXPECT_NEAR(*a.rho2, *b.rho2, 1e-9); }
  EXPECT_NEAR(a.rho3, b.rho3, 1e-9);
}

}  // namespace

TEST(Score, PerfectMatch) {
  const auto t = InteractionMatrix::from_groups(6, {{0, 1, 2}, {4, 5}});
  const auto s = score(t, t);
  EXPECT_EQ(s.rho1, 100.0);
  EXPECT_EQ(s.rho2, 100.0);
  EXPECT_EQ(s.rho3, 100.0);
}

TEST(Score, IdentityTruthHasNoRho1) {
  const auto s = score(InteractionMatrix::identity(5), InteractionMatrix::identity(5));
  EXPECT_FALSE(s.rho1.has_value());
  EXPECT_EQ(s.rho2, 100.0);
  EXPECT_EQ(s.rho3, 100.0);
  EXPECT_TRUE(s.to_json()["rho1"].is_null());
}

TEST(Score, FullTruthHasNoRho2) {
  const auto full = InteractionMatrix::from_groups(4, {{0, 1, 2, 3}});
  const auto s = score(InteractionMatrix::identity(4), full);
  EXPECT_EQ(s.rho1, 0.0);
  EXPECT_FALSE(s.rho2.has_value());
  EXPECT_EQ(s.rho3, 0.0);
}

TEST(Score, SingleMissedPair) {
  const auto truth = InteractionMatrix::from_groups(4, {{0, 1}});
  const auto s = score(InteractionMatrix::identity(4), truth);
  EXPECT_EQ(s.rho1, 0.0);
  EXPECT_EQ(s.rho2, 100.0);
  EXPECT_NEAR(s.rho3, 100.0 * 5.0 / 6.0, 1e-12);
}

TEST(Score, RejectsMismatchedSizes) {
  EXPECT_THROW(score(InteractionMatrix::identity(3), InteractionMatrix::identity(4)), ValidationError);
}

TEST(Score, MatchesBruteForce) {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 8);
    const auto t = random_matrix(n, uniform01(rng), rng);
    const auto e = random_matrix(n, uniform01(rng), rng);
    expect_same(score(e, t), brute_force(e, t));
  }
}

TEST(Score, PermutationInvariant) {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 10);
    const auto t = random_matrix(n, 0.3, rng);
    const auto e = random_matrix(n, 0.3, rng);
    VarSet perm = iota_set(n);
    shuffle_in_place(perm, rng);
    expect_same(score(e, t), score(permuted(e, perm), permuted(t, perm)));
  }
}

TEST(Score, Rho3IsFullOnlyOnExactAgreement) {
  Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 6);
    const auto t = random_matrix(n, 0.4, rng);
    const auto e = random_matrix(n, 0.4, rng);
    EXPECT_EQ(score(e, t).rho3 == 100.0, e == t);
  }
}

TEST(DecompositionMatrix, LinksOnlyNonSeparableGroups) {
  Decomposition d;
  d.nonseps = {{0, 3}};
  d.seps = {{1, 2}};
  const auto m = decomposition_matrix(4, d);
  EXPECT_TRUE(m(0, 3));
  EXPECT_FALSE(m(1, 2));
  EXPECT_EQ(m.link_count(), 1u);
}
