#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "irrg/benchmark.hpp"
#include "irrg/common.hpp"
#include "irrg/interaction_matrix.hpp"

namespace irrg {

// --- floating-point tolerance -------------------------------------------------

struct EpsilonModel {
  double mu = 0x1.0p-53;  // round-off unit of binary64
};

/// k * mu / (1 - k * mu); requires k * mu < 1.
inline double gamma(double k, const EpsilonModel& model = {}) {
  if (k < 0.0) throw ValidationError("gamma needs a non-negative k");
  const double km = k * model.mu;
  if (km >= 1.0) throw ValidationError("gamma undefined for k * mu >= 1");
  return km / (1.0 - km);
}

/// Tolerance for deciding which of two fitness values is better in an
/// n-dimensional problem. Infinite inputs give an infinite tolerance.
inline double pair_epsilon(std::size_t n, double y_a, double y_b, const EpsilonModel& model = {}) {
  return gamma(std::sqrt(static_cast<double>(n)) + 1.0, model) * (std::abs(y_a) + std::abs(y_b));
}

/// Signum with a dead zone of half-width eps.
inline int sgn_eps(double x, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("sgn_eps needs eps >= 0");
  if (x < -eps) return -1;
  if (x > eps) return 1;
  return 0;
}

/// sgn_eps(a - b, pair_epsilon(a, b)) with the penalty convention for
/// infinite fitness: inf vs inf is indistinguishable, inf beats nothing.
inline int compare_fitness(double a, double b, std::size_t n, const EpsilonModel& model = {}) {
  if (std::isinf(a) || std::isinf(b)) {
    if (a == b) return 0;
    return a > b ? 1 : -1;
  }
  return sgn_eps(a - b, pair_epsilon(n, a, b, model));
}

// --- samples and rankings -------------------------------------------------------

/// n_s x n matrix; column j holds n_s evenly spaced values of variable j.
class SampleMatrix {
 public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols) {}

  static SampleMatrix from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) throw ValidationError("sample matrix needs rows");
    SampleMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw ValidationError("ragged sample matrix");
      std::copy(rows[i].begin(), rows[i].end(), m.v_.begin() + static_cast<std::ptrdiff_t>(i * m.cols_));
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vector v_;
};

inline SampleMatrix build_sample_matrix(const Bounds& bounds, std::size_t n_s, Rng& rng) {
  if (n_s < 2) throw ValidationError("sample count must be at least 2");
  SampleMatrix m(n_s, bounds.size());
  Vector col(n_s);
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    const double step = bounds[j].width() / static_cast<double>(n_s - 1);
    for (std::size_t i = 0; i < n_s; ++i) col[i] = bounds[j].lo + step * static_cast<double>(i);
    col.back() = bounds[j].hi;
    for (auto& v : col) v = bounds[j].clamp(v);
    shuffle_in_place(col, rng);
    for (std::size_t i = 0; i < n_s; ++i) m(i, j) = col[i];
  }
  return m;
}

struct Ranking {
  std::vector<std::size_t> order;  // sample indices, best first
};

/// Stable ascending order of fitness values (ties by sample index).
inline Ranking rank_ascending(std::span<const double> y) {
  Ranking r;
  r.order.resize(y.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) {
    // +inf sorts last; NaN is not expected from well-formed objectives.
    return y[a] < y[b];
  });
  return r;
}

// --- evaluation cache ------------------------------------------------------------

/// Objective wrapper that reuses fitness values of previously seen vectors.
/// Vectors are keyed by a 128-bit fingerprint of their bit patterns.
class CachedObjective {
 public:
  explicit CachedObjective(const ProblemInstance& f) : f_(&f) {}

  double operator()(std::span<const double> x) {
    const Key k = fingerprint(x);
    if (auto it = cache_.find(k); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    if (limit_ && misses_ >= *limit_) throw BudgetExhausted("evaluation limit reached");
    const double y = f_->evaluate(x);
    ++misses_;
    cache_.emplace(k, y);
    return y;
  }

  std::size_t dimension() const { return f_->dimension(); }
  const Bounds& bounds() const { return f_->bounds(); }
  const ProblemInstance& problem() const { return *f_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  void clear() { cache_.clear(); }
  /// Caps the number of true evaluations; further misses throw BudgetExhausted.
  void set_limit(std::optional<std::uint64_t> limit) { limit_ = limit; }

 private:
  struct Key {
    std::uint64_t a, b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return static_cast<std::size_t>(k.a ^ (k.b * 0x9E3779B97F4A7C15ULL)); }
  };

  static Key fingerprint(std::span<const double> x) {
    std::uint64_t a = 0xcbf29ce484222325ULL;  // FNV-1a
    std::uint64_t b = 0x84222325cbf29ce4ULL ^ x.size();
    for (double v : x) {
      if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      a = (a ^ bits) * 0x100000001b3ULL;
      b = derive_seed(b, bits);
    }
    return {a, b};
  }

  const ProblemInstance* f_;
  std::unordered_map<Key, double, KeyHash> cache_;
  std::uint64_t hits_ = 0, misses_ = 0;
  std::optional<std::uint64_t> limit_;
};

// --- ranking-based interaction test -------------------------------------------------

namespace detail {

inline void require_nonempty(const VarSet& s, const char* what) {
  if (s.empty()) throw ValidationError(std::string(what) + " must not be empty");
}

inline void require_disjoint(const VarSet& a, const VarSet& b, std::size_t n) {
  std::vector<std::uint8_t> mark(n, 0);
  for (Index v : a) {
    if (v >= n) throw ValidationError("variable index out of range");
    mark[v] = 1;
  }
  for (Index v : b) {
    if (v >= n) throw ValidationError("variable index out of range");
    if (mark[v]) throw ValidationError("variable sets overlap at index " + std::to_string(v));
  }
}

inline void assign_row(Vector& x, const VarSet& vars, const SampleMatrix& samples, std::size_t row) {
  for (Index v : vars) x[v] = samples(row, v);
}

}  // namespace detail

struct FirstRanking {
  Vector fitness;  // one value per sample row
  Ranking ranking;
};

/// Evaluates x with the X1 coordinates replaced by each sample row and ranks
/// the results.
template <class Objective>
FirstRanking create_first_ranking(const VarSet& x1, std::span<const double> x,
                                  const SampleMatrix& samples, Objective& f, std::size_t n_s) {
  detail::require_nonempty(x1, "X1");
  if (n_s > samples.rows()) throw ValidationError("n_s exceeds sample rows");
  Vector probe(x.begin(), x.end());
  FirstRanking out;
  out.fitness.resize(n_s);
  for (std::size_t i = 0; i < n_s; ++i) {
    detail::assign_row(probe, x1, samples, i);
    out.fitness[i] = f(probe);
  }
  out.ranking = rank_ascending(out.fitness);
  return out;
}

/// Sample pair whose order flips between the two contexts: y1_better <= y1_worse
/// (both decisive) while y2_better > y2_worse.
struct InteractionWitness {
  std::size_t sample_better = 0;
  std::size_t sample_worse = 0;
  double y1_better = 0, y1_worse = 0;
  double y2_better = 0, y2_worse = 0;
};

struct InteractionCheck {
  bool interacting = false;
  std::optional<InteractionWitness> witness;
  std::size_t evaluations = 0;  // objective calls, including cache hits
};

/// Builds the second ranking lazily (X2 taken from x2bar) in the order of the
/// first ranking and reports the first decisive order inversion.
template <class Objective>
InteractionCheck check_interaction(const VarSet& x1, const VarSet& x2, std::span<const double> x_hq,
                                   const SampleMatrix& samples, std::span<const double> x2bar,
                                   const FirstRanking& first, Objective& f, std::size_t n_s,
                                   const EpsilonModel& model = {}) {
  const std::size_t n = x_hq.size();
  detail::require_nonempty(x1, "X1");
  detail::require_nonempty(x2, "X2");
  detail::require_disjoint(x1, x2, n);
  if (x2bar.size() != n) throw ValidationError("x2bar dimension mismatch");
  if (first.fitness.size() < n_s || first.ranking.order.size() < n_s)
    throw ValidationError("first ranking shorter than n_s");

  const auto& y1 = first.fitness;
  const auto& r1 = first.ranking.order;
  InteractionCheck out;
  Vector probe(x_hq.begin(), x_hq.end());
  for (Index v : x2) probe[v] = x2bar[v];
  detail::assign_row(probe, x1, samples, r1[0]);
  double prev_y2 = f(probe);
  std::size_t prev = 0;
  ++out.evaluations;
  for (std::size_t i = 1; i < n_s; ++i) {
    if (compare_fitness(y1[r1[i]], y1[r1[i - 1]], n, model) == 0) continue;
    detail::assign_row(probe, x1, samples, r1[i]);
    const double y2 = f(probe);
    ++out.evaluations;
    // Compared with the most recently computed entry of the second ranking.
    if (compare_fitness(y2, prev_y2, n, model) < 0) {
      out.interacting = true;
      out.witness = InteractionWitness{r1[prev], r1[i], y1[r1[prev]], y1[r1[i]], prev_y2, y2};
      return out;
    }
    prev_y2 = y2;
    prev = i;
  }
  return out;
}

template <class Objective>
bool is_interaction(const VarSet& x1, const VarSet& x2, std::span<const double> x_hq,
                    const SampleMatrix& samples, std::span<const double> x2bar,
                    const FirstRanking& first, Objective& f, std::size_t n_s) {
  return check_interaction(x1, x2, x_hq, samples, x2bar, first, f, n_s).interacting;
}

}  // namespace irrg
