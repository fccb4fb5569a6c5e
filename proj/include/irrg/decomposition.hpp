#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "irrg/common.hpp"
#include "irrg/interaction_matrix.hpp"

namespace irrg {

/// Result of a decomposer: packed groups of separable variables and groups of
/// interacting variables.
struct Decomposition {
  Groups seps;
  Groups nonseps;
  std::uint64_t ffe_cost = 0;       // every evaluation, bootstrap included
  std::uint64_t bootstrap_ffe = 0;  // part of ffe_cost spent before grouping
  std::uint64_t iterations = 0;
  std::uint64_t seed = 0;
  bool budget_exhausted = false;    // grouping was cut short by an evaluation cap

  std::size_t dimension() const {
    std::size_t n = 0;
    for (const auto& g : seps) n += g.size();
    for (const auto& g : nonseps) n += g.size();
    return n;
  }

  /// Optimization components: non-separable groups first, then separable ones.
  Groups components() const {
    Groups out = nonseps;
    out.insert(out.end(), seps.begin(), seps.end());
    return out;
  }

  /// Checks that the groups partition {0..n-1}.
  void validate(std::size_t n) const {
    std::vector<std::uint8_t> seen(n, 0);
    auto visit = [&](const Groups& gs, const char* kind) {
      for (const auto& g : gs) {
        if (g.empty()) throw ValidationError(std::string("empty ") + kind + " group");
        for (Index v : g) {
          if (v >= n) throw ValidationError("decomposition index out of range");
          if (seen[v]) throw ValidationError("variable " + std::to_string(v) + " appears twice");
          seen[v] = 1;
        }
      }
    };
    visit(seps, "separable");
    visit(nonseps, "non-separable");
    for (std::size_t v = 0; v < n; ++v)
      if (!seen[v]) throw ValidationError("variable " + std::to_string(v) + " is not covered");
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"seps", seps},
                          {"nonseps", nonseps},
                          {"ffe_cost", ffe_cost},
                          {"bootstrap_ffe", bootstrap_ffe},
                          {"iterations", iterations},
                          {"seed", seed},
                          {"budget_exhausted", budget_exhausted}};
  }

  static Decomposition from_json(const nlohmann::json& j) {
    Decomposition d;
    try {
      d.seps = j.at("seps").get<Groups>();
      d.nonseps = j.at("nonseps").get<Groups>();
      d.ffe_cost = j.value("ffe_cost", std::uint64_t{0});
      d.bootstrap_ffe = j.value("bootstrap_ffe", std::uint64_t{0});
      d.iterations = j.value("iterations", std::uint64_t{0});
      d.seed = j.value("seed", std::uint64_t{0});
      d.budget_exhausted = j.value("budget_exhausted", false);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed decomposition document: ") + e.what());
    }
    return d;
  }
};

/// Splits `loose` (kept in the given order) into consecutive groups of
/// `eps_s`; the last group holds the remainder.
inline Groups pack_separable(const VarSet& loose, std::size_t eps_s) {
  if (eps_s == 0) throw ValidationError("separable group size must be at least 1");
  Groups out;
  for (std::size_t i = 0; i < loose.size(); i += eps_s)
    out.emplace_back(loose.begin() + static_cast<std::ptrdiff_t>(i),
                     loose.begin() + static_cast<std::ptrdiff_t>(std::min(loose.size(), i + eps_s)));
  return out;
}

/// Components of size > 1 become non-separable groups; singletons are packed
/// in ascending order.
inline void fill_from_matrix(Decomposition& d, const InteractionMatrix& theta, std::size_t eps_s) {
  d.seps.clear();
  d.nonseps.clear();
  VarSet loose;
  for (auto& c : theta.components()) {
    if (c.size() == 1)
      loose.push_back(c.front());
    else
      d.nonseps.push_back(std::move(c));
  }
  std::sort(loose.begin(), loose.end());
  d.seps = pack_separable(loose, eps_s);
}

}  // namespace irrg
