#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "irrg/common.hpp"
#include "irrg/decomposition.hpp"
#include "irrg/optimizers.hpp"

namespace irrg {

enum class Framework { cbcc, ccfr2 };

inline std::string to_string(Framework f) { return f == Framework::cbcc ? "cbcc" : "ccfr2"; }

inline Framework parse_framework(const std::string& s) {
  if (s == "cbcc") return Framework::cbcc;
  if (s == "ccfr2") return Framework::ccfr2;
  throw ConfigError("unknown framework '" + s + "' (expected cbcc or ccfr2)");
}

struct CcConfig {
  Framework framework = Framework::cbcc;
  double w = 0.5;
  std::uint64_t round_unit = 1000;  // FFEs per round (cbcc) or ES generations per round (ccfr2)
  std::uint64_t total_budget = 0;
  std::uint64_t seed = 1;
  EsConfig es;

  static CcConfig cbcc(std::uint64_t budget, std::uint64_t seed = 1) {
    CcConfig c;
    c.framework = Framework::cbcc;
    c.w = 0.5;
    c.round_unit = 1000;
    c.total_budget = budget;
    c.seed = seed;
    return c;
  }

  static CcConfig ccfr2(std::uint64_t budget, std::uint64_t seed = 1) {
    CcConfig c;
    c.framework = Framework::ccfr2;
    c.w = 0.1;
    c.round_unit = 100;
    c.total_budget = budget;
    c.seed = seed;
    return c;
  }

  void validate() const {
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("smoothing factor w must lie in [0,1]");
    if (round_unit < 1) throw ValidationError("round unit must be at least 1");
    if (total_budget < 1) throw ValidationError("total budget must be positive");
  }
};

struct ComponentState {
  VarSet indices;
  double contribution = 0.0;
  std::uint64_t ffe_spent = 0;
  std::uint64_t rounds = 0;
};

/// Exponential smoothing of a component's improvement (per FFE for ccfr2).
/// Negative improvements are clipped to zero and reported through `clipped`.
inline ComponentState update_contribution(ComponentState state, double improvement,
                                          std::uint64_t ffe_delta, const CcConfig& config,
                                          bool* clipped = nullptr) {
  if (ffe_delta < 1) throw ValidationError("ffe_delta must be at least 1");
  if (clipped) *clipped = improvement < 0.0;
  improvement = std::max(0.0, improvement);
  const double gain = config.framework == Framework::cbcc ? improvement
                                                          : improvement / static_cast<double>(ffe_delta);
  state.contribution = config.w * state.contribution + (1.0 - config.w) * gain;
  state.ffe_spent += ffe_delta;
  return state;
}

struct CcTraceRow {
  std::uint64_t ffe = 0;
  double best_f = 0.0;
  std::size_t selected = 0;
};

struct CcResult {
  OptimizerRun run;
  std::vector<CcTraceRow> trace;
  std::vector<ComponentState> components;
};

inline void write_cc_trace_csv(std::ostream& out, const std::vector<CcTraceRow>& trace) {
  out << "ffe,best_f,selected_component\n";
  out.precision(17);
  for (const auto& r : trace) out << r.ffe << ',' << r.best_f << ',' << r.selected << '\n';
}

/// Picks the largest contribution; ties go to the component selected least
/// often, then to the lowest index.
inline std::size_t select_component(const std::vector<ComponentState>& comps) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < comps.size(); ++i) {
    const auto& a = comps[i];
    const auto& b = comps[best];
    if (a.contribution > b.contribution || (a.contribution == b.contribution && a.rounds < b.rounds)) best = i;
  }
  return best;
}

/// Contribution-based cooperative co-evolution. Each component owns a
/// resumable ES and is evaluated through the shared context vector.
template <class Objective>
CcResult cc_run(Objective&& f, const Bounds& bounds, const Decomposition& decomposition,
                const CcConfig& config) {
  config.validate();
  validate_bounds(bounds);
  const std::size_t n = bounds.size();
  decomposition.validate(n);

  CcResult out;
  std::uint64_t used = 0;
  Rng ctx_rng(derive_seed(config.seed, 0));
  Vector context = random_point(bounds, ctx_rng);
  double context_f = f(std::span<const double>(context));
  ++used;

  const Groups groups = decomposition.components();
  std::vector<std::unique_ptr<CmaEs>> solvers;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    ComponentState s;
    s.indices = groups[i];
    out.components.push_back(s);
    Bounds sub;
    Vector start;
    for (Index v : groups[i]) {
      sub.push_back(bounds[v]);
      start.push_back(context[v]);
    }
    solvers.push_back(std::make_unique<CmaEs>(start, sub, config.es, derive_seed(config.seed, i + 1)));
  }

  Vector probe;
  auto round = [&](std::size_t c) -> bool {
    const VarSet& idx = out.components[c].indices;
    probe = context;
    auto restricted = [&](std::span<const double> y) {
      for (std::size_t k = 0; k < idx.size(); ++k) probe[idx[k]] = y[k];
      return f(std::span<const double>(probe));
    };
    const std::uint64_t remaining = config.total_budget - used;
    CmaEs::Progress p;
    if (config.framework == Framework::cbcc)
      p = solvers[c]->run(restricted, std::min(config.round_unit, remaining));
    else
      p = solvers[c]->run(restricted, remaining, config.round_unit);
    if (p.evaluations == 0) return false;
    used += p.evaluations;
    double improvement = 0.0;
    if (p.best_f < context_f) {
      improvement = context_f - p.best_f;
      for (std::size_t k = 0; k < idx.size(); ++k) context[idx[k]] = p.best_x[k];
      context_f = p.best_f;
    }
    out.components[c] = update_contribution(out.components[c], improvement, p.evaluations, config);
    ++out.components[c].rounds;
    out.trace.push_back({used, context_f, c});
    return true;
  };

  for (std::size_t c = 0; c < groups.size() && used < config.total_budget; ++c) round(c);
  std::size_t idle = 0;
  while (used < config.total_budget && idle < groups.size()) {
    const std::size_t c = select_component(out.components);
    if (round(c)) {
      idle = 0;
    } else {
      // A collapsed search distribution cannot spend budget: restart it at the context.
      Bounds sub;
      Vector start;
      for (Index v : out.components[c].indices) {
        sub.push_back(bounds[v]);
        start.push_back(context[v]);
      }
      solvers[c] = std::make_unique<CmaEs>(start, sub, config.es,
                                           derive_seed(config.seed, 1000003 + out.components[c].rounds));
      ++out.components[c].rounds;
      ++idle;
    }
  }
  out.run.best_x = context;
  out.run.best_f = context_f;
  out.run.ffe_used = used;
  for (const auto& r : out.trace) out.run.trace.push_back({r.ffe, r.best_f});
  return out;
}

}  // namespace irrg
