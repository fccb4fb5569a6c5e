#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "irrg/common.hpp"

namespace irrg {

/// Midranks (1-based) of the pooled sample.
inline Vector midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  Vector r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mid;
    i = j + 1;
  }
  return r;
}

enum class WilcoxonMethod { automatic, exact, normal };

struct WilcoxonResult {
  double p_value = 1.0;
  double statistic = 0.0;  // rank sum of sample a
  bool exact = false;
};

/// Two-sided rank-sum test. Exact null distribution (over all splits of the
/// pooled midranks) when the combined size is at most 20, otherwise a normal
/// approximation with tie-corrected variance and continuity correction.
inline WilcoxonResult wilcoxon_rank_sum_test(std::span<const double> a, std::span<const double> b,
                                             WilcoxonMethod method = WilcoxonMethod::automatic) {
  if (a.empty() || b.empty()) throw ValidationError("rank-sum test needs two non-empty samples");
  for (double v : a)
    if (std::isnan(v)) throw ValidationError("rank-sum test sample contains NaN");
  for (double v : b)
    if (std::isnan(v)) throw ValidationError("rank-sum test sample contains NaN");
  Vector pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t na = a.size(), n = pooled.size();
  const Vector ranks = midranks(pooled);
  WilcoxonResult res;
  for (std::size_t i = 0; i < na; ++i) res.statistic += ranks[i];
  const double mean = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;
  const double observed = std::abs(res.statistic - mean);

  const bool exact = method == WilcoxonMethod::exact || (method == WilcoxonMethod::automatic && n <= 20);
  res.exact = exact;
  if (exact) {
    // Doubled midranks are integers; count subsets of size na by doubled sum.
    std::vector<std::size_t> twice(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      twice[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
      total += twice[i];
    }
    std::vector<std::vector<double>> count(na + 1, std::vector<double>(total + 1, 0.0));
    count[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = std::min(na, i + 1); k >= 1; --k)
        for (std::size_t s = total; s + 1 > twice[i]; --s) count[k][s] += count[k - 1][s - twice[i]];
    double extreme = 0.0, all = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      const double c = count[na][s];
      if (c == 0.0) continue;
      all += c;
      if (std::abs(static_cast<double>(s) / 2.0 - mean) >= observed - 1e-9) extreme += c;
    }
    res.p_value = std::min(1.0, extreme / all);
    return res;
  }

  const double nad = static_cast<double>(na), nbd = static_cast<double>(b.size()), nd = static_cast<double>(n);
  Vector sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  const double var = nad * nbd / 12.0 * ((nd + 1.0) - tie_sum / (nd * (nd - 1.0)));
  if (!(var > 0.0)) {
    res.p_value = 1.0;
    return res;
  }
  const double z = std::max(0.0, observed - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

inline double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  return wilcoxon_rank_sum_test(a, b).p_value;
}

/// Step-down multiple-comparison correction. Flags are returned in the
/// order of the input p-values (true = null hypothesis rejected).
inline std::vector<bool> holm_bonferroni(std::span<const double> p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("p-values must lie in [0,1]");
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
  std::vector<bool> reject(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (p[order[i]] > alpha / static_cast<double>(m - i)) break;
    reject[order[i]] = true;
  }
  return reject;
}

struct SampleSummary {
  double median = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

inline SampleSummary summarize(std::span<const double> v) {
  if (v.empty()) throw ValidationError("cannot summarize an empty sample");
  SampleSummary s;
  Vector sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double x : sorted) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace irrg
