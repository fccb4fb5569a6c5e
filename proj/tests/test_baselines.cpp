#include <gtest/gtest.h>

#include "irrg/baselines.hpp"

using namespace irrg;

namespace {

ProblemInstance planted_blocks(MonotoneTransform t, std::size_t blocks = 4, std::size_t size = 8) {
  const std::size_t n = blocks * size;
  const auto bounds = uniform_bounds(n, -10, 10);
  return build_instance(block_structure(blocks, size, BaseKind::schwefel12), t, n, bounds,
                        default_shift(bounds, 5), "planted");
}

ProblemInstance sphere_tail(std::size_t n, MonotoneTransform t = MonotoneTransform::identity) {
  const auto bounds = uniform_bounds(n, -5, 5);
  return build_instance(block_structure(0, 1, BaseKind::sphere, n), t, n, bounds, default_shift(bounds, 3));
}

bool spans_components(const Decomposition& d, const InteractionMatrix& truth) {
  for (const auto& g : d.nonseps)
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = a + 1; b < g.size(); ++b)
        if (!truth(g[a], g[b])) return true;
  return false;
}

Groups sorted_groups(Groups g) {
  for (auto& v : g) std::sort(v.begin(), v.end());
  std::sort(g.begin(), g.end());
  return g;
}

}  // namespace

TEST(DgPair, FalseLinkageOnNonAdditiveSeparableFixture) {
  const auto f = make_fixture("fbar_c1");
  const DgProbe probe{1.0, 1.0, 1.0, 2.0, Vector{0, 0}};
  const auto r = dg_pair_check(f, f.bounds(), 0, 1, probe);
  EXPECT_DOUBLE_EQ(r.delta1, 5.0);
  EXPECT_DOUBLE_EQ(r.delta2, 7.0);
  EXPECT_TRUE(r.interacting);
  EXPECT_EQ(f.evaluations(), 4u);
}

TEST(DgPair, ProductProbe) {
  const auto f = make_fixture("product2");
  const auto r = dg_pair_check(f, f.bounds(), 0, 1, DgProbe{0.0, 1.0, 0.0, 1.0, Vector{0, 0}});
  EXPECT_DOUBLE_EQ(r.delta1, 0.0);
  EXPECT_DOUBLE_EQ(r.delta2, 1.0);
  EXPECT_TRUE(r.interacting);
}

TEST(DgPair, AdditivePairsNeverInteract) {
  const auto f = make_fixture("sum_squares2");
  const auto g = sphere_tail(6);
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double a = uniform(rng, -5, 4), delta = uniform(rng, 1e-3, 5 - a);
    const double b1 = uniform(rng, -5, 5), b2 = uniform(rng, -5, 5);
    if (b1 == b2) continue;
    DgProbe probe{a, delta, b1, b2, random_point(f.bounds(), rng)};
    const auto r = dg_pair_check(f, f.bounds(), 0, 1, probe);
    ASSERT_FALSE(r.interacting) << "probe " << i;
    ASSERT_NEAR(r.delta1, r.delta2, r.epsilon);

    probe.base = random_point(g.bounds(), rng);
    const Index p = uniform_index(rng, 6);
    const Index q = (p + 1 + uniform_index(rng, 5)) % 6;
    ASSERT_FALSE(dg_pair_check(g, g.bounds(), p, q, probe).interacting);
  }
}

TEST(DgPair, RejectsBadProbes) {
  const auto f = make_fixture("product2");
  EXPECT_THROW(dg_pair_check(f, f.bounds(), 0, 0, DgProbe{0, 1, 0, 1, {0, 0}}), ValidationError);
  EXPECT_THROW(dg_pair_check(f, f.bounds(), 0, 1, DgProbe{0, 0, 0, 1, {0, 0}}), ValidationError);
  EXPECT_THROW(dg_pair_check(f, f.bounds(), 0, 1, DgProbe{0, 1, 1, 1, {0, 0}}), ValidationError);
  EXPECT_THROW(dg_pair_check(f, f.bounds(), 0, 1, DgProbe{0.5, 1, 0, 1, {0, 0}}), ValidationError);
}

TEST(RdgGroup, AdditiveGroupsDoNotInteract) {
  const auto f = planted_blocks(MonotoneTransform::identity);
  EXPECT_FALSE(rdg_group_check(f, f.bounds(), {0, 1, 2, 3, 4, 5, 6, 7}, {8, 9, 10, 11, 20}).interacting);
}

TEST(RdgGroup, SchwefelHalvesInteract) {
  const auto f = planted_blocks(MonotoneTransform::identity, 1, 8);
  EXPECT_TRUE(rdg_group_check(f, f.bounds(), {0, 1, 2, 3}, {4, 5, 6, 7}).interacting);
}

TEST(RdgGroup, SquaredSeparableShowsFalseLinkage) {
  const auto f = sphere_tail(8, MonotoneTransform::square);
  Rng rng(6);
  bool any = false;
  for (int i = 0; i < 50 && !any; ++i) {
    GroupProbe p{random_point(f.bounds(), rng), random_point(f.bounds(), rng), random_point(f.bounds(), rng)};
    any = rdg_group_check(f, f.bounds(), {0, 1, 2, 3}, {4, 5, 6, 7}, p).interacting;
  }
  EXPECT_TRUE(any);
}

TEST(RdgGroup, InfeasibleProbeIsRejected) {
  const auto f = make_fixture("product2");
  GroupProbe p{{0, 0}, {2, 0}, {0, 0}};
  EXPECT_THROW(rdg_group_check(f, f.bounds(), {0}, {1}, p), ValidationError);
}

TEST(Rdg3, SeparableSpherePacksBySize) {
  const auto f = sphere_tail(32);
  Rdg3Config cfg;
  cfg.eps_s = 10;
  const auto d = rdg3_decompose(f, cfg);
  EXPECT_TRUE(d.nonseps.empty());
  std::vector<std::size_t> sizes;
  for (const auto& g : d.seps) sizes.push_back(g.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{10, 10, 10, 2}));
  EXPECT_EQ(d.ffe_cost, f.evaluations());
}

TEST(Rdg3, RecoversAdditiveBlocks) {
  const auto f = planted_blocks(MonotoneTransform::identity);
  const auto d = rdg3_decompose(f);
  EXPECT_EQ(sorted_groups(d.nonseps), f.ground_truth().components());
  EXPECT_TRUE(d.seps.empty());
  EXPECT_EQ(d.ffe_cost, f.evaluations());
}

TEST(Rdg3, SquareTransformCausesFalseLinkage) {
  const auto f = planted_blocks(MonotoneTransform::square);
  const auto d = rdg3_decompose(f);
  EXPECT_TRUE(spans_components(d, f.ground_truth()));
}

TEST(Rdg3, GroupsAreCutNearTheSizeCap) {
  // A chain grows one variable per merge, so groups are cut at exactly eps_n.
  const std::size_t n = 20;
  const auto bounds = uniform_bounds(n, -2, 2);
  const auto f = build_instance(block_structure(19, 2, BaseKind::rosenbrock, 0, BaseKind::sphere, 1),
                                MonotoneTransform::identity, n, bounds);
  Rdg3Config cfg;
  cfg.eps_n = 6;
  const auto d = rdg3_decompose(f, cfg);
  for (const auto& g : d.nonseps) EXPECT_LE(g.size(), cfg.eps_n);
  EXPECT_NO_THROW(d.validate(n));
  EXPECT_GE(d.nonseps.size(), 3u);
}

TEST(Fvil, SeparableInstancesHaveNoLinks) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    FvilConfig cfg;
    cfg.seed = s;
    const auto f = sphere_tail(12, MonotoneTransform::square);
    const auto d = fvil_decompose(f, cfg);
    EXPECT_TRUE(d.nonseps.empty()) << "seed " << s;
    EXPECT_EQ(d.ffe_cost, f.evaluations());
    EXPECT_TRUE(fvil_decompose(make_fixture("fbar_c1"), cfg).nonseps.empty());
    EXPECT_TRUE(fvil_decompose(make_fixture("fbar_c4"), cfg).nonseps.empty());
  }
}

TEST(Fvil, NeverLinksAcrossPlantedBlocks) {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    FvilConfig cfg;
    cfg.seed = s;
    const auto f = planted_blocks(MonotoneTransform::square, 3, 4);
    const auto d = fvil_decompose(f, cfg);
    EXPECT_FALSE(spans_components(d, f.ground_truth())) << "seed " << s;
    EXPECT_NO_THROW(d.validate(f.dimension()));
  }
}

TEST(Fvil, ProductDetectionFrequency) {
  // Each trial on x1 * x2 succeeds when the sampled x2 and its replacement
  // differ in sign, with probability 1/2, so ten trials miss with 2^-10.
  const auto f = make_fixture("product2");
  Rng rng(8);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) hits += fvil_group_check(f, f.bounds(), {0}, {1}, 10, rng);
  EXPECT_GE(hits, 990);

  int single = 0;
  for (int i = 0; i < 4000; ++i) single += fvil_group_check(f, f.bounds(), {0}, {1}, 1, rng);
  EXPECT_NEAR(single / 4000.0, 0.5, 0.03);
}
