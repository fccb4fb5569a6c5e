#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace irrg {

// Error taxonomy. Every failure raised by the library derives from Error so
// callers (the CLI in particular) can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct StructuralError : Error {
  using Error::Error;
};
struct FeasibilityError : Error {
  using Error::Error;
};
struct UnavailableGroundTruth : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct GenerationError : Error {
  using Error::Error;
};
struct BudgetExhausted : Error {
  using Error::Error;
};

using Index = std::size_t;
using VarSet = std::vector<Index>;
using Groups = std::vector<VarSet>;
using Vector = std::vector<double>;
using Rng = std::mt19937_64;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return std::clamp(v, lo, hi); }
};

using Bounds = std::vector<Interval>;

inline Bounds uniform_bounds(std::size_t n, double lo, double hi) {
  return Bounds(n, Interval{lo, hi});
}

inline void validate_bounds(const Bounds& bounds) {
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto& b = bounds[i];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi))
      throw ValidationError("bounds[" + std::to_string(i) + "] must satisfy lo < hi");
  }
}

inline bool is_feasible(std::span<const double> x, const Bounds& bounds) {
  if (x.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!bounds[i].contains(x[i])) return false;
  return true;
}

// Random variates are produced here rather than through <random>
// distributions, whose output differs between standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::min(hi, lo + (hi - lo) * uniform01(rng));
}

inline double standard_normal(Rng& rng) {
  double u1;
  do {
    u1 = uniform01(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double cauchy(Rng& rng, double location, double scale) {
  return location + scale * std::tan(std::numbers::pi * (uniform01(rng) - 0.5));
}

inline Vector random_point(const Bounds& bounds, Rng& rng) {
  Vector x(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) x[i] = uniform(rng, bounds[i].lo, bounds[i].hi);
  return x;
}

inline VarSet flatten(const Groups& groups) {
  VarSet out;
  for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

inline VarSet iota_set(std::size_t n) {
  VarSet v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

// Derives an independent 64-bit seed for a sub-stream (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw ValidationError("uniform_index on empty range");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

template <class T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace irrg
