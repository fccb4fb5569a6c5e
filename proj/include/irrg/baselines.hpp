#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "irrg/benchmark.hpp"
#include "irrg/common.hpp"
#include "irrg/decomposition.hpp"
#include "irrg/interaction.hpp"

namespace irrg {

/// Tolerance for a difference of differences built from four evaluations.
inline double four_point_epsilon(std::size_t n, double f1, double f2, double f3, double f4,
                                 const EpsilonModel& model = {}) {
  return gamma(std::sqrt(static_cast<double>(n)) + 2.0, model) *
         (std::abs(f1) + std::abs(f2) + std::abs(f3) + std::abs(f4));
}

// --- pairwise differential check ---------------------------------------------------

struct DgProbe {
  double a = 0.0;
  double delta = 1.0;
  double b1 = 0.0;
  double b2 = 1.0;
  Vector base;
};

struct DgResult {
  bool interacting = false;
  double delta1 = 0.0;  // f(a+delta, b1) - f(a, b1)
  double delta2 = 0.0;  // f(a+delta, b2) - f(a, b2)
  double epsilon = 0.0;
};

template <class Objective>
DgResult dg_pair_check(Objective& f, const Bounds& bounds, Index p, Index q, const DgProbe& probe,
                       const EpsilonModel& model = {}) {
  const std::size_t n = bounds.size();
  if (p >= n || q >= n || p == q) throw ValidationError("dg check needs two distinct valid indices");
  if (!(probe.delta > 0.0)) throw ValidationError("dg probe delta must be positive");
  if (probe.b1 == probe.b2) throw ValidationError("dg probe needs b1 != b2");
  if (probe.base.size() != n) throw ValidationError("dg probe base dimension mismatch");
  if (!bounds[p].contains(probe.a) || !bounds[p].contains(probe.a + probe.delta) ||
      !bounds[q].contains(probe.b1) || !bounds[q].contains(probe.b2))
    throw ValidationError("dg probe is infeasible");

  Vector x = probe.base;
  auto at = [&](double xp, double xq) {
    x[p] = xp;
    x[q] = xq;
    return f(std::span<const double>(x));
  };
  const double f1 = at(probe.a, probe.b1);
  const double f2 = at(probe.a + probe.delta, probe.b1);
  const double f3 = at(probe.a, probe.b2);
  const double f4 = at(probe.a + probe.delta, probe.b2);
  DgResult r;
  r.delta1 = f2 - f1;
  r.delta2 = f4 - f3;
  r.epsilon = four_point_epsilon(n, f1, f2, f3, f4, model);
  r.interacting = std::abs(r.delta1 - r.delta2) > r.epsilon;
  return r;
}

// --- recursive group check -------------------------------------------------------------

/// Points of the four-corner group check: X1 moves from `base` to `x1_value`,
/// X2 moves from `base` to `x2_value`.
struct GroupProbe {
  Vector base;
  Vector x1_value;
  Vector x2_value;
};

/// Lower-bound corner as base, X1 to the upper bound, X2 to the midpoint.
inline GroupProbe canonical_group_probe(const Bounds& bounds) {
  GroupProbe g;
  for (const auto& b : bounds) {
    g.base.push_back(b.lo);
    g.x1_value.push_back(b.hi);
    g.x2_value.push_back(b.mid());
  }
  return g;
}

template <class Objective>
DgResult rdg_group_check(Objective& f, const Bounds& bounds, const VarSet& x1, const VarSet& x2,
                         const GroupProbe& probe, const EpsilonModel& model = {}) {
  const std::size_t n = bounds.size();
  detail::require_nonempty(x1, "X1");
  detail::require_nonempty(x2, "X2");
  detail::require_disjoint(x1, x2, n);
  if (probe.base.size() != n || probe.x1_value.size() != n || probe.x2_value.size() != n)
    throw ValidationError("group probe dimension mismatch");

  Vector x = probe.base;
  if (!is_feasible(x, bounds)) throw ValidationError("group probe base is infeasible");
  auto set = [&](const VarSet& vars, const Vector& src) {
    for (Index v : vars) {
      if (!bounds[v].contains(src[v])) throw ValidationError("group probe is infeasible");
      x[v] = src[v];
    }
  };
  const double f_ll = f(std::span<const double>(x));
  set(x1, probe.x1_value);
  const double f_ul = f(std::span<const double>(x));
  set(x2, probe.x2_value);
  const double f_um = f(std::span<const double>(x));
  set(x1, probe.base);
  const double f_lm = f(std::span<const double>(x));
  DgResult r;
  r.delta1 = f_ul - f_ll;
  r.delta2 = f_um - f_lm;
  r.epsilon = four_point_epsilon(n, f_ll, f_ul, f_lm, f_um, model);
  r.interacting = std::abs(r.delta1 - r.delta2) > r.epsilon;
  return r;
}

template <class Objective>
DgResult rdg_group_check(Objective& f, const Bounds& bounds, const VarSet& x1, const VarSet& x2,
                         const EpsilonModel& model = {}) {
  return rdg_group_check(f, bounds, x1, x2, canonical_group_probe(bounds), model);
}

struct Rdg3Config {
  std::size_t eps_s = 100;
  std::size_t eps_n = 50;

  void validate() const {
    if (eps_s < 1) throw ValidationError("eps_s must be at least 1");
    if (eps_n < 2) throw ValidationError("eps_n must be at least 2");
  }
};

namespace detail {

// Variables of x2 that interact with x1, found by bisection of x2.
template <class Check>
void bisect_interacting(const VarSet& x1, const VarSet& x2, Check& check, VarSet& found) {
  if (x2.empty() || !check(x1, x2)) return;
  if (x2.size() == 1) {
    found.push_back(x2.front());
    return;
  }
  const auto mid = static_cast<std::ptrdiff_t>(x2.size() / 2);
  bisect_interacting(x1, VarSet(x2.begin(), x2.begin() + mid), check, found);
  bisect_interacting(x1, VarSet(x2.begin() + mid, x2.end()), check, found);
}

inline VarSet set_minus(const VarSet& a, const VarSet& b, std::size_t n) {
  std::vector<std::uint8_t> drop(n, 0);
  for (Index v : b) drop[v] = 1;
  VarSet out;
  for (Index v : a)
    if (!drop[v]) out.push_back(v);
  return out;
}

}  // namespace detail

/// Recursive differential grouping with a size cap on non-separable groups.
/// The variable order is fixed, so the result does not depend on a seed.
inline Decomposition rdg3_decompose(const ProblemInstance& f, const Rdg3Config& config = {},
                                    const EpsilonModel& model = {}) {
  config.validate();
  const std::size_t n = f.dimension();
  const Bounds& bounds = f.bounds();
  const std::uint64_t start = f.evaluations();
  CachedObjective cached(f);
  const GroupProbe probe = canonical_group_probe(bounds);
  auto check = [&](const VarSet& a, const VarSet& b) {
    return rdg_group_check(cached, bounds, a, b, probe, model).interacting;
  };

  Decomposition d;
  VarSet loose;
  auto close_group = [&](VarSet& g) {
    if (g.size() == 1)
      loose.push_back(g.front());
    else if (g.size() > 1)
      d.nonseps.push_back(g);
  };
  if (n > 0) {
    VarSet x1{0};
    VarSet x2;
    for (Index v = 1; v < n; ++v) x2.push_back(v);
    while (!x2.empty()) {
      VarSet found;
      detail::bisect_interacting(x1, x2, check, found);
      if (found.empty()) {
        close_group(x1);
        x1 = VarSet{x2.front()};
        x2.erase(x2.begin());
        continue;
      }
      x1.insert(x1.end(), found.begin(), found.end());
      x2 = detail::set_minus(x2, found, n);
      if (x1.size() >= config.eps_n && !x2.empty()) {
        close_group(x1);
        x1 = VarSet{x2.front()};
        x2.erase(x2.begin());
      }
    }
    close_group(x1);
  }
  for (auto& g : d.nonseps) std::sort(g.begin(), g.end());
  std::sort(loose.begin(), loose.end());
  d.seps = pack_separable(loose, config.eps_s);
  d.ffe_cost = f.evaluations() - start;
  d.iterations = 1;
  return d;
}

// --- randomized monotonicity checks ---------------------------------------------------------

struct FvilConfig {
  std::size_t N = 10;
  std::size_t eps_s = 100;
  std::uint64_t seed = 1;

  void validate() const {
    if (N < 1) throw ValidationError("N must be at least 1");
    if (eps_s < 1) throw ValidationError("eps_s must be at least 1");
  }
};

/// Up to N random four-point trials; reports interaction when moving X1 is
/// decisively better in one X2 context and decisively worse in the other.
template <class Objective>
bool fvil_group_check(Objective& f, const Bounds& bounds, const VarSet& x1, const VarSet& x2,
                      std::size_t tries, Rng& rng, const EpsilonModel& model = {}) {
  const std::size_t n = bounds.size();
  for (std::size_t t = 0; t < tries; ++t) {
    Vector x = random_point(bounds, rng);
    Vector u1(x1.size()), u2(x2.size());
    for (std::size_t i = 0; i < x1.size(); ++i) u1[i] = uniform(rng, bounds[x1[i]].lo, bounds[x1[i]].hi);
    for (std::size_t i = 0; i < x2.size(); ++i) u2[i] = uniform(rng, bounds[x2[i]].lo, bounds[x2[i]].hi);
    const Vector x_orig = x;
    const double f00 = f(std::span<const double>(x));
    for (std::size_t i = 0; i < x1.size(); ++i) x[x1[i]] = u1[i];
    const double f10 = f(std::span<const double>(x));
    for (std::size_t i = 0; i < x2.size(); ++i) x[x2[i]] = u2[i];
    const double f11 = f(std::span<const double>(x));
    for (std::size_t i = 0; i < x1.size(); ++i) x[x1[i]] = x_orig[x1[i]];
    const double f01 = f(std::span<const double>(x));
    const int c1 = compare_fitness(f00, f10, n, model);
    const int c2 = compare_fitness(f01, f11, n, model);
    if (c1 * c2 < 0) return true;
  }
  return false;
}

/// Grows each group from a single seed variable: every newly found member is
/// queued and checked against the remaining variables.
inline Decomposition fvil_decompose(const ProblemInstance& f, const FvilConfig& config = {},
                                    const EpsilonModel& model = {}) {
  config.validate();
  const std::size_t n = f.dimension();
  const Bounds& bounds = f.bounds();
  const std::uint64_t start = f.evaluations();
  Rng rng(config.seed);
  auto direct = [&f](std::span<const double> x) { return f.evaluate(x); };
  auto check = [&](const VarSet& a, const VarSet& b) {
    return fvil_group_check(direct, bounds, a, b, config.N, rng, model);
  };

  Decomposition d;
  d.seed = config.seed;
  VarSet loose;
  VarSet remaining = iota_set(n);
  while (!remaining.empty()) {
    VarSet group{remaining.front()};
    remaining.erase(remaining.begin());
    std::deque<Index> queue{group.front()};
    while (!queue.empty() && !remaining.empty()) {
      const Index u = queue.front();
      queue.pop_front();
      VarSet found;
      detail::bisect_interacting(VarSet{u}, remaining, check, found);
      for (Index v : found) {
        group.push_back(v);
        queue.push_back(v);
      }
      remaining = detail::set_minus(remaining, found, n);
    }
    if (group.size() == 1) {
      loose.push_back(group.front());
    } else {
      std::sort(group.begin(), group.end());
      d.nonseps.push_back(std::move(group));
    }
  }
  d.seps = pack_separable(loose, config.eps_s);
  d.ffe_cost = f.evaluations() - start;
  d.iterations = 1;
  return d;
}

}  // namespace irrg
