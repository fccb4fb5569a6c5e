#include <gtest/gtest.h>

#include <set>

#include "irrg/common.hpp"
#include "irrg/interaction_matrix.hpp"

using namespace irrg;

TEST(Rng, Uniform01StaysInUnitInterval) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, UniformIndexCoversRange) {
  Rng rng(9);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(uniform_index(rng, 7));
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_THROW(uniform_index(rng, 0), ValidationError);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(3);
  VarSet v = iota_set(50);
  shuffle_in_place(v, rng);
  std::set<Index> s(v.begin(), v.end());
  EXPECT_EQ(s.size(), 50u);
  EXPECT_NE(v, iota_set(50));
}

TEST(Bounds, ValidationRejectsEmptyOrInvertedIntervals) {
  EXPECT_THROW(validate_bounds({{1.0, 1.0}}), ValidationError);
  EXPECT_THROW(validate_bounds({{2.0, 1.0}}), ValidationError);
  EXPECT_NO_THROW(validate_bounds({{-1.0, 1.0}}));
  EXPECT_TRUE(is_feasible(Vector{0.0, 1.0}, uniform_bounds(2, 0, 1)));
  EXPECT_FALSE(is_feasible(Vector{0.0, 1.5}, uniform_bounds(2, 0, 1)));
}

TEST(InteractionMatrix, IdentityHasOnlyDiagonal) {
  const auto m = InteractionMatrix::identity(4);
  EXPECT_EQ(m.link_count(), 0u);
  EXPECT_TRUE(m.is_symmetric());
  EXPECT_EQ(m.components().size(), 4u);
}

TEST(InteractionMatrix, LinkIsSymmetricAndReportsChange) {
  auto m = InteractionMatrix::identity(3);
  EXPECT_TRUE(m.link(0, 2));
  EXPECT_FALSE(m.link(2, 0));
  EXPECT_TRUE(m(2, 0));
  EXPECT_THROW(m.link(0, 3), ValidationError);
}

TEST(InteractionMatrix, ComponentsFollowPaths) {
  auto m = InteractionMatrix::identity(6);
  m.link(0, 3);
  m.link(3, 5);
  m.link(1, 4);
  const Groups expected{{0, 3, 5}, {1, 4}, {2}};
  EXPECT_EQ(m.components(), expected);
  const auto c = m.closure();
  EXPECT_TRUE(c(0, 5));
  EXPECT_FALSE(m(0, 5));
}

TEST(InteractionMatrix, TextRoundTrip) {
  auto m = InteractionMatrix::identity(4);
  m.link(1, 3);
  const std::string text = m.to_text();
  EXPECT_EQ(text, "1\n01\n001\n0101\n");
  EXPECT_EQ(InteractionMatrix::from_text(text), m);
}

TEST(InteractionMatrix, TextParserRejectsMalformedInput) {
  EXPECT_THROW(InteractionMatrix::from_text("1\n011\n"), ValidationError);
  EXPECT_THROW(InteractionMatrix::from_text("1\n00\n"), ValidationError);
  EXPECT_THROW(InteractionMatrix::from_text("1\n2 1\n"), ValidationError);
}

TEST(UpdateMatrix, GroupLinksAllMembers) {
  auto [m, added] = update_matrix(InteractionMatrix::identity(4), {{0, 1, 2}});
  EXPECT_EQ(added, 3u);
  EXPECT_TRUE(m(0, 2));
  EXPECT_FALSE(m(0, 3));
}

TEST(UpdateMatrix, MergesTouchedComponents) {
  auto base = InteractionMatrix::from_groups(6, {{0, 1}, {4, 5}});
  auto [m, added] = update_matrix(base, {{1, 4}});
  // {0,1} and {4,5} fuse into one block of four: 6 pairs, 2 already present.
  EXPECT_EQ(added, 4u);
  EXPECT_TRUE(m(0, 5));
  EXPECT_EQ(m.components().front(), (VarSet{0, 1, 4, 5}));
}

TEST(UpdateMatrix, KnownGroupAddsNothing) {
  auto base = InteractionMatrix::from_groups(3, {{0, 1, 2}});
  auto [m, added] = update_matrix(base, {{2, 0}});
  EXPECT_EQ(added, 0u);
  EXPECT_EQ(m, base);
}

TEST(UpdateMatrix, NeverRemovesLinks) {
  Rng rng(11);
  auto m = InteractionMatrix::identity(12);
  for (int step = 0; step < 30; ++step) {
    VarSet g;
    for (int k = 0; k < 2; ++k) g.push_back(uniform_index(rng, 12));
    if (g[0] == g[1]) continue;
    auto [next, added] = update_matrix(m, {g});
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j)
        if (m(i, j)) { ASSERT_TRUE(next(i, j)); }
    EXPECT_EQ(next.link_count(), m.link_count() + added);
    EXPECT_EQ(next, next.closure());
    m = next;
  }
}
