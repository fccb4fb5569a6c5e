#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>

#include "irrg/stats.hpp"

using namespace irrg;

namespace {

// Two-sided p-value by listing every way to pick |a| of the pooled positions.
double brute_force_p(const Vector& a, const Vector& b) {
  Vector pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  Vector rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (double v : pooled) {
      less += v < pooled[i];
      equal += v == pooled[i];
    }
    rank[i] = less + (equal + 1.0) / 2.0;
  }
  double observed = 0;
  for (std::size_t i = 0; i < na; ++i) observed += rank[i];
  const double mean = static_cast<double>(na * (n + 1)) / 2.0;
  std::uint64_t extreme = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) s += rank[i];
    ++total;
    if (std::abs(s - mean) >= std::abs(observed - mean) - 1e-9) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

TEST(Wilcoxon, HandExamples) {
  const auto r = wilcoxon_rank_sum_test(Vector{1, 2, 3}, Vector{10, 20, 30});
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.p_value, 0.1);
  EXPECT_EQ(r.statistic, 6.0);
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(Vector{1}, Vector{2}), 1.0);
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(Vector{4, 5, 6}, Vector{4, 5, 6}), 1.0);
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(Vector{10, 20, 30}, Vector{1, 2, 3}), 0.1);
}

TEST(Wilcoxon, RejectsBadSamples) {
  EXPECT_THROW(wilcoxon_rank_sum(Vector{}, Vector{1}), ValidationError);
  EXPECT_THROW(wilcoxon_rank_sum(Vector{1}, Vector{}), ValidationError);
  EXPECT_THROW(wilcoxon_rank_sum(Vector{std::nan("")}, Vector{1}), ValidationError);
}

TEST(Wilcoxon, ExactMatchesEnumerationWithTies) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t na = 1 + uniform_index(rng, 7), nb = 1 + uniform_index(rng, 12 - na);
    Vector a(na), b(nb);
    const bool ties = trial % 2 == 0;
    for (auto& v : a) v = ties ? static_cast<double>(uniform_index(rng, 5)) : uniform01(rng);
    for (auto& v : b) v = ties ? static_cast<double>(uniform_index(rng, 5)) : uniform01(rng) + 0.2;
    ASSERT_EQ(wilcoxon_rank_sum_test(a, b, WilcoxonMethod::exact).p_value, brute_force_p(a, b))
        << "sizes " << na << "," << nb;
  }
}

TEST(Wilcoxon, SwitchesToApproximationAboveTwenty) {
  Vector a(11), b(10);
  for (std::size_t i = 0; i < 11; ++i) a[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < 10; ++i) b[i] = static_cast<double>(i) + 5.5;
  EXPECT_FALSE(wilcoxon_rank_sum_test(a, b).exact);
  a.pop_back();
  EXPECT_TRUE(wilcoxon_rank_sum_test(a, b).exact);
}

TEST(Wilcoxon, ApproximationTracksExactAtSizeTwenty) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    Vector a(10), b(10);
    const double shift = uniform(rng, 0.0, 1.5);
    std::normal_distribution<double> normal;
    for (auto& v : a) v = normal(rng);
    for (auto& v : b) v = normal(rng) + shift;
    const double exact = wilcoxon_rank_sum_test(a, b, WilcoxonMethod::exact).p_value;
    const double approx = wilcoxon_rank_sum_test(a, b, WilcoxonMethod::normal).p_value;
    EXPECT_NEAR(exact, approx, 0.02) << "trial " << trial;
  }
}

TEST(Wilcoxon, MidranksAverageTies) {
  EXPECT_EQ(midranks(Vector{3, 1, 3, 2}), (Vector{3.5, 1, 3.5, 2}));
}

TEST(Holm, StepDownExamples) {
  EXPECT_EQ(holm_bonferroni(Vector{0.01, 0.04}, 0.05), (std::vector<bool>{true, true}));
  EXPECT_EQ(holm_bonferroni(Vector{0.03, 0.04}, 0.05), (std::vector<bool>{false, false}));
  EXPECT_EQ(holm_bonferroni(Vector{0.05}, 0.05), (std::vector<bool>{true}));
  EXPECT_EQ(holm_bonferroni(Vector{0.0501}, 0.05), (std::vector<bool>{false}));
  // Order of the input is kept; a failure stops the procedure.
  EXPECT_EQ(holm_bonferroni(Vector{0.2, 0.001, 0.03, 0.011}, 0.05), (std::vector<bool>{false, true, false, true}));
  EXPECT_TRUE(holm_bonferroni(Vector{}, 0.05).empty());
}

TEST(Holm, ValidatesInputs) {
  EXPECT_THROW(holm_bonferroni(Vector{0.5}, 0.0), ValidationError);
  EXPECT_THROW(holm_bonferroni(Vector{0.5}, 1.0), ValidationError);
  EXPECT_THROW(holm_bonferroni(Vector{1.5}, 0.05), ValidationError);
  EXPECT_THROW(holm_bonferroni(Vector{-0.1}, 0.05), ValidationError);
}

TEST(Holm, NeverRejectsMoreThanBonferroniAllowsAtFirstStep) {
  Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    Vector p(1 + uniform_index(rng, 8));
    for (auto& v : p) v = uniform01(rng) * 0.1;
    const auto r = holm_bonferroni(p, 0.05);
    const double smallest = *std::min_element(p.begin(), p.end());
    const bool any = std::find(r.begin(), r.end(), true) != r.end();
    EXPECT_EQ(any, smallest <= 0.05 / static_cast<double>(p.size()));
    // Rejections are closed downward in p.
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j)
        if (r[i] && p[j] < p[i]) EXPECT_TRUE(r[j]);
  }
}

TEST(Summary, MedianMeanStd) {
  const auto s = summarize(Vector{4, 1, 3, 2});
  EXPECT_EQ(s.median, 2.5);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(summarize(Vector{7}).stddev, 0.0);
  EXPECT_THROW(summarize(Vector{}), ValidationError);
}
