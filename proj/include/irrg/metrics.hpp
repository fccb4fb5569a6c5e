#pragma once

#include <optional>

#include <json.hpp>

#include "irrg/common.hpp"
#include "irrg/decomposition.hpp"
#include "irrg/interaction_matrix.hpp"

namespace irrg {

/// Percentages in [0, 100]. rho1 (found links) and rho2 (absent links kept
/// absent) are empty when the ground truth has nothing to find or reject.
struct AccuracyScores {
  std::optional<double> rho1;
  std::optional<double> rho2;
  double rho3 = 100.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["rho1"] = rho1 ? nlohmann::json(*rho1) : nlohmann::json(nullptr);
    j["rho2"] = rho2 ? nlohmann::json(*rho2) : nlohmann::json(nullptr);
    j["rho3"] = rho3;
    return j;
  }
};

/// Counts over unordered pairs i < j.
inline AccuracyScores score(const InteractionMatrix& theta, const InteractionMatrix& truth) {
  const std::size_t n = theta.size();
  if (truth.size() != n) throw ValidationError("score needs matrices of equal dimension");
  if (!theta.is_symmetric() || !truth.is_symmetric())
    throw ValidationError("score needs symmetric matrices with a true diagonal");
  std::size_t true_links = 0, found = 0, absent = 0, kept_absent = 0, agree = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool t = truth(i, j), e = theta(i, j);
      if (t) {
        ++true_links;
        found += e;
      } else {
        ++absent;
        kept_absent += !e;
      }
      agree += t == e;
    }
  AccuracyScores s;
  if (true_links > 0) s.rho1 = 100.0 * static_cast<double>(found) / static_cast<double>(true_links);
  if (absent > 0) s.rho2 = 100.0 * static_cast<double>(kept_absent) / static_cast<double>(absent);
  const std::size_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  s.rho3 = pairs > 0 ? 100.0 * static_cast<double>(agree) / static_cast<double>(pairs) : 100.0;
  return s;
}

/// Interaction matrix implied by a decomposition: each non-separable group is
/// fully linked; packed separable groups carry no links.
inline InteractionMatrix decomposition_matrix(std::size_t n, const Decomposition& d) {
  return InteractionMatrix::from_groups(n, d.nonseps);
}

}  // namespace irrg
