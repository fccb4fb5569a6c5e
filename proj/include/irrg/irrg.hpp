#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "irrg/benchmark.hpp"
#include "irrg/common.hpp"
#include "irrg/decomposition.hpp"
#include "irrg/interaction.hpp"
#include "irrg/interaction_matrix.hpp"
#include "irrg/optimizers.hpp"

namespace irrg {

struct IrrgConfig {
  std::size_t n_s = 10;
  std::size_t eps_sti = 15;
  std::size_t eps_s = 100;
  std::uint64_t bootstrap_global_ffe = 5000;
  std::uint64_t bootstrap_local_ffe = 15000;
  std::uint64_t seed = 1;
  /// Optional cap on all evaluations (bootstrap included).
  std::optional<std::uint64_t> max_ffe;

  void validate() const {
    if (n_s < 2) throw ValidationError("n_s must be at least 2");
    if (eps_sti < 1) throw ValidationError("eps_sti must be at least 1");
    if (eps_s < 1) throw ValidationError("eps_s must be at least 1");
  }

  BootstrapConfig bootstrap() const {
    BootstrapConfig b;
    b.global_ffe = bootstrap_global_ffe;
    b.local_ffe = bootstrap_local_ffe;
    return b;
  }
};

/// High-quality point for the grouping phase, using the configured budgets.
template <class Objective>
OptimizerRun find_xhq(Objective&& f, const Bounds& bounds, const IrrgConfig& config) {
  return find_xhq(f, bounds, config.bootstrap(), derive_seed(config.seed, 1));
}

// --- group search ----------------------------------------------------------------

/// Decides whether the loose variables V deserve a place in this pass: always
/// when nothing is grouped yet or V is a single variable; otherwise only when
/// a random half split of V, or V against some existing group, interacts.
template <class Objective>
bool consider_variables(const VarSet& v, const Groups& g, std::span<const double> x_hq,
                        const SampleMatrix& samples, std::span<const double> x2bar, Objective& f,
                        std::size_t n_s, Rng& rng) {
  if (g.empty() || v.size() == 1) return true;
  if (v.empty()) return false;
  VarSet shuffled = v;
  shuffle_in_place(shuffled, rng);
  const auto mid = static_cast<std::ptrdiff_t>(shuffled.size() / 2);
  const VarSet v1(shuffled.begin(), shuffled.begin() + mid);
  const VarSet v2(shuffled.begin() + mid, shuffled.end());

  auto interacts = [&](const VarSet& a, const VarSet& b) {
    const auto first = create_first_ranking(a, x_hq, samples, f, n_s);
    return is_interaction(a, b, x_hq, samples, x2bar, first, f, n_s);
  };
  if (interacts(v1, v2)) return true;
  if (interacts(v2, v1)) return true;
  for (const auto& group : g) {
    if (interacts(shuffled, group)) return true;
    if (interacts(group, shuffled)) return true;
  }
  return false;
}

namespace detail {

inline VarSet flatten_range(const Groups& g, std::size_t lo, std::size_t hi) {
  VarSet out;
  for (std::size_t i = lo; i < hi; ++i) out.insert(out.end(), g[i].begin(), g[i].end());
  return out;
}

// Indices in [lo, hi) of g2 whose groups interact with x1, found by bisection.
template <class Objective>
void interact_range(const VarSet& x1, const Groups& g2, std::size_t lo, std::size_t hi,
                    std::span<const double> x_hq, const SampleMatrix& samples,
                    std::span<const double> x2bar, const FirstRanking& first, Objective& f,
                    std::size_t n_s, std::vector<std::size_t>& found) {
  if (lo >= hi) return;
  const VarSet x2 = flatten_range(g2, lo, hi);
  if (!is_interaction(x1, x2, x_hq, samples, x2bar, first, f, n_s)) return;
  if (hi - lo == 1) {
    found.push_back(lo);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  interact_range(x1, g2, lo, mid, x_hq, samples, x2bar, first, f, n_s, found);
  interact_range(x1, g2, mid, hi, x_hq, samples, x2bar, first, f, n_s, found);
}

}  // namespace detail

/// Returns G1 extended by every group of G2 found to interact with flatten(G1).
/// `first` must be the first ranking built for flatten(G1).
template <class Objective>
Groups interact(const Groups& g1, const Groups& g2, std::span<const double> x_hq,
                const SampleMatrix& samples, std::span<const double> x2bar,
                const FirstRanking& first, Objective& f, std::size_t n_s) {
  std::vector<std::size_t> found;
  detail::interact_range(flatten(g1), g2, 0, g2.size(), x_hq, samples, x2bar, first, f, n_s, found);
  Groups out = g1;
  for (std::size_t i : found) out.push_back(g2[i]);
  return out;
}

/// One recursive ranking grouping pass. Returns the groups of interacting
/// variables it confirmed (possibly including links already in theta).
template <class Objective>
Groups rrg(std::span<const double> x_hq, std::span<const double> x2bar, const InteractionMatrix& theta,
           Objective& f, const Bounds& bounds, std::size_t n_s, Rng& rng) {
  const std::size_t n = bounds.size();
  if (theta.size() != n) throw ValidationError("interaction matrix dimension mismatch");
  if (!is_feasible(x_hq, bounds)) throw ValidationError("x_hq is infeasible");
  if (!is_feasible(x2bar, bounds)) throw ValidationError("x2bar is infeasible");

  Groups g;
  VarSet loose;
  for (auto& c : theta.components()) {
    if (c.size() > 1) {
      shuffle_in_place(c, rng);
      g.push_back(std::move(c));
    } else {
      loose.push_back(c.front());
    }
  }
  const SampleMatrix samples = build_sample_matrix(bounds, n_s, rng);
  if (consider_variables(loose, g, x_hq, samples, x2bar, f, n_s, rng))
    for (Index v : loose) g.push_back({v});

  Groups nonseps;
  if (g.empty()) return nonseps;
  shuffle_in_place(g, rng);
  Groups g1{std::move(g.front())};
  Groups g2(std::make_move_iterator(g.begin() + 1), std::make_move_iterator(g.end()));

  while (!g2.empty()) {
    const VarSet x1 = flatten(g1);
    const auto first = create_first_ranking(x1, x_hq, samples, f, n_s);
    std::vector<std::size_t> found;
    detail::interact_range(x1, g2, 0, g2.size(), x_hq, samples, x2bar, first, f, n_s, found);
    if (found.empty()) {
      if (g1.size() == 1) {
        std::size_t min_size = g2.front().size();
        for (const auto& grp : g2) min_size = std::min(min_size, grp.size());
        VarSet& only = g1.front();
        if (only.size() >= std::max<std::size_t>(min_size, 2)) {
          // Drop floor(|G1[0]|/2) uniformly chosen members, keep the rest in order.
          std::vector<std::size_t> pick(only.size());
          for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
          shuffle_in_place(pick, rng);
          std::vector<std::uint8_t> drop(only.size(), 0);
          for (std::size_t i = 0; i < only.size() / 2; ++i) drop[pick[i]] = 1;
          VarSet kept;
          for (std::size_t i = 0; i < only.size(); ++i)
            if (!drop[i]) kept.push_back(only[i]);
          only = std::move(kept);
          continue;
        }
      } else {
        nonseps.push_back(x1);
      }
      g1 = Groups{std::move(g2.front())};
      g2.erase(g2.begin());
    } else {
      std::vector<std::uint8_t> taken(g2.size(), 0);
      for (std::size_t i : found) {
        g1.push_back(g2[i]);
        taken[i] = 1;
      }
      Groups rest;
      for (std::size_t i = 0; i < g2.size(); ++i)
        if (!taken[i]) rest.push_back(std::move(g2[i]));
      g2 = std::move(rest);
    }
  }
  if (g1.size() > 1) nonseps.push_back(flatten(g1));
  return nonseps;
}

// --- incremental driver --------------------------------------------------------------

struct IrrgHooks {
  /// Called after every pass with the updated interaction matrix.
  std::function<void(const InteractionMatrix&)> on_iteration;
};

/// Repeats grouping passes with fresh random second contexts until a pass adds
/// no link (immediately on the first pass, otherwise after eps_sti stale passes).
inline Decomposition irrg(const ProblemInstance& f, const IrrgConfig& config, const IrrgHooks& hooks = {}) {
  config.validate();
  const std::size_t n = f.dimension();
  const Bounds& bounds = f.bounds();
  Decomposition d;
  d.seed = config.seed;
  InteractionMatrix theta = InteractionMatrix::identity(n);
  const std::uint64_t start = f.evaluations();
  auto spent = [&] { return f.evaluations() - start; };

  // Bootstrap, shrunk to fit an evaluation cap when one is set.
  BootstrapConfig boot = config.bootstrap();
  if (config.max_ffe) {
    boot.global_ffe = std::min(boot.global_ffe, *config.max_ffe);
    if (boot.global_ffe > 0 && boot.global_ffe < 4) boot.global_ffe = 0;
    boot.local_ffe = std::min(boot.local_ffe, *config.max_ffe - boot.global_ffe);
  }
  auto direct = [&f](std::span<const double> x) { return f.evaluate(x); };
  const Vector x_hq = find_xhq(direct, bounds, boot, derive_seed(config.seed, 1)).best_x;
  d.bootstrap_ffe = spent();

  Rng rng(derive_seed(config.seed, 2));
  std::size_t stale = 0;
  bool first_iter = true;
  bool terminate = n == 0;
  while (!terminate) {
    const Vector x_lq = random_point(bounds, rng);
    CachedObjective cached(f);
    if (config.max_ffe) cached.set_limit(*config.max_ffe > spent() ? *config.max_ffe - spent() : 0);
    Groups found;
    try {
      found = rrg(x_hq, x_lq, theta, cached, bounds, config.n_s, rng);
    } catch (const BudgetExhausted&) {
      d.budget_exhausted = true;
      ++d.iterations;
      break;
    }
    ++d.iterations;
    auto [next, new_links] = update_matrix(std::move(theta), found);
    theta = std::move(next);
    if (hooks.on_iteration) hooks.on_iteration(theta);
    if (new_links == 0) {
      ++stale;
      terminate = first_iter || stale == config.eps_sti;
    } else {
      stale = 0;
    }
    first_iter = false;
  }
  fill_from_matrix(d, theta, config.eps_s);
  d.ffe_cost = spent();
  return d;
}

}  // namespace irrg
