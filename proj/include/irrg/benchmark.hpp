#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "irrg/common.hpp"
#include "irrg/interaction_matrix.hpp"

namespace irrg {

enum class BaseKind { sphere, elliptic, rastrigin, ackley, schwefel12, rosenbrock, custom };

inline std::string to_string(BaseKind k) {
  switch (k) {
    case BaseKind::sphere: return "sphere";
    case BaseKind::elliptic: return "elliptic";
    case BaseKind::rastrigin: return "rastrigin";
    case BaseKind::ackley: return "ackley";
    case BaseKind::schwefel12: return "schwefel-1.2";
    case BaseKind::rosenbrock: return "rosenbrock";
    case BaseKind::custom: return "custom";
  }
  return "?";
}

inline BaseKind parse_base_kind(const std::string& s) {
  static const std::map<std::string, BaseKind> names{
      {"sphere", BaseKind::sphere},         {"elliptic", BaseKind::elliptic},
      {"rastrigin", BaseKind::rastrigin},   {"ackley", BaseKind::ackley},
      {"schwefel-1.2", BaseKind::schwefel12}, {"schwefel12", BaseKind::schwefel12},
      {"rosenbrock", BaseKind::rosenbrock}, {"custom", BaseKind::custom}};
  auto it = names.find(s);
  if (it == names.end()) throw ConfigError("unknown base function '" + s + "'");
  return it->second;
}

/// True for kinds that are sums of per-variable terms, so their variables
/// never interact. Multi-variable ackley couples its variables through the
/// two exponentials and therefore counts as non-separable; a separable
/// ackley analogue is a tail of one-variable ackley terms.
inline bool is_separable_kind(BaseKind k) {
  return k == BaseKind::sphere || k == BaseKind::elliptic || k == BaseKind::rastrigin;
}

/// Evaluates a base function on already shifted coordinates. Every kind has
/// minimum 0 at z = 0.
inline double evaluate_base(BaseKind kind, std::span<const double> z) {
  const std::size_t k = z.size();
  double s = 0.0;
  switch (kind) {
    case BaseKind::sphere:
      for (double v : z) s += v * v;
      return s;
    case BaseKind::elliptic:
      for (std::size_t i = 0; i < k; ++i) {
        const double e = k > 1 ? 6.0 * static_cast<double>(i) / static_cast<double>(k - 1) : 0.0;
        s += std::pow(10.0, e) * z[i] * z[i];
      }
      return s;
    case BaseKind::rastrigin:
      for (double v : z) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v) + 10.0;
      return s;
    case BaseKind::ackley: {
      if (k == 0) return 0.0;
      double sq = 0.0, cs = 0.0;
      for (double v : z) {
        sq += v * v;
        cs += std::cos(2.0 * std::numbers::pi * v);
      }
      const double kd = static_cast<double>(k);
      const double r = -20.0 * std::exp(-0.2 * std::sqrt(sq / kd)) - std::exp(cs / kd) + 20.0 +
                       std::numbers::e;
      return std::max(0.0, r);  // round-off can dip a few ulps below zero
    }
    case BaseKind::schwefel12: {
      double prefix = 0.0;
      for (double v : z) {
        prefix += v;
        s += prefix * prefix;
      }
      return s;
    }
    case BaseKind::rosenbrock:
      // Shifted by one so the optimum sits at z = 0.
      for (std::size_t i = 0; i + 1 < k; ++i) {
        const double a = z[i] + 1.0, b = z[i + 1] + 1.0;
        s += 100.0 * (a * a - b) * (a * a - b) + (a - 1.0) * (a - 1.0);
      }
      return s;
    case BaseKind::custom:
      break;
  }
  throw ValidationError("custom base functions need an explicit evaluator");
}

enum class MonotoneTransform { identity, square, sqrt };

inline std::string to_string(MonotoneTransform t) {
  switch (t) {
    case MonotoneTransform::identity: return "identity";
    case MonotoneTransform::square: return "square";
    case MonotoneTransform::sqrt: return "sqrt";
  }
  return "?";
}

inline MonotoneTransform parse_transform(const std::string& s) {
  if (s == "identity" || s == "none") return MonotoneTransform::identity;
  if (s == "square") return MonotoneTransform::square;
  if (s == "sqrt") return MonotoneTransform::sqrt;
  throw ConfigError("unknown transform '" + s + "'");
}

inline double apply_transform(MonotoneTransform t, double y) {
  switch (t) {
    case MonotoneTransform::identity: return y;
    case MonotoneTransform::square: return y * y;
    case MonotoneTransform::sqrt: return std::sqrt(std::max(0.0, y));
  }
  return y;
}

using Evaluator = std::function<double(std::span<const double>)>;

struct GroupSpec {
  VarSet indices;
  BaseKind kind = BaseKind::sphere;
  double weight = 1.0;
  // Only for BaseKind::custom: the closed form over the group's coordinates
  // and, optionally, its local interaction structure (all-linked if absent).
  Evaluator custom;
  std::optional<InteractionMatrix> custom_truth;
};

struct OverlapDecl {
  std::size_t group_a = 0;
  std::size_t group_b = 0;
  VarSet shared;
};

struct StructureSpec {
  std::vector<GroupSpec> groups;
  std::vector<OverlapDecl> overlap;
  std::size_t separable_tail = 0;  // trailing variables, one subfunction each
  BaseKind tail_kind = BaseKind::sphere;
};

struct GroundTruth {
  InteractionMatrix direct;
  InteractionMatrix indirect;  // transitive closure of direct
};

/// Bounded black-box objective with an FFE counter. The evaluator is shared
/// and immutable; the counter tolerates concurrent increments.
class ProblemInstance {
 public:
  ProblemInstance(std::string name, Bounds bounds, Evaluator evaluator,
                  std::optional<GroundTruth> truth = std::nullopt)
      : name_(std::move(name)),
        bounds_(std::move(bounds)),
        evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))),
        truth_(std::move(truth)) {
    validate_bounds(bounds_);
    if (truth_ && truth_->direct.size() != bounds_.size())
      throw StructuralError("ground truth dimension differs from problem dimension");
  }

  ProblemInstance(const ProblemInstance& o)
      : name_(o.name_),
        bounds_(o.bounds_),
        evaluator_(o.evaluator_),
        truth_(o.truth_),
        counter_(o.counter_.load(std::memory_order_relaxed)) {}

  ProblemInstance& operator=(const ProblemInstance& o) {
    if (this != &o) {
      name_ = o.name_;
      bounds_ = o.bounds_;
      evaluator_ = o.evaluator_;
      truth_ = o.truth_;
      counter_.store(o.counter_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    }
    return *this;
  }

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return bounds_.size(); }
  const Bounds& bounds() const { return bounds_; }

  double evaluate(std::span<const double> x) const {
    if (x.size() != bounds_.size())
      throw ValidationError("expected " + std::to_string(bounds_.size()) + " coordinates, got " +
                            std::to_string(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(x[i]))
        throw ValidationError("coordinate " + std::to_string(i) + " is not finite");
      if (!bounds_[i].contains(x[i]))
        throw FeasibilityError("coordinate " + std::to_string(i) + " outside bounds");
    }
    counter_.fetch_add(1, std::memory_order_relaxed);
    return (*evaluator_)(x);
  }

  double operator()(std::span<const double> x) const { return evaluate(x); }

  std::uint64_t evaluations() const { return counter_.load(std::memory_order_relaxed); }

  bool has_ground_truth() const { return truth_.has_value(); }

  const InteractionMatrix& ground_truth() const {
    if (!truth_) throw UnavailableGroundTruth("problem '" + name_ + "' has no structural ground truth");
    return truth_->direct;
  }

  const InteractionMatrix& indirect_truth() const {
    if (!truth_) throw UnavailableGroundTruth("problem '" + name_ + "' has no structural ground truth");
    return truth_->indirect;
  }

 private:
  std::string name_;
  Bounds bounds_;
  std::shared_ptr<const Evaluator> evaluator_;
  std::optional<GroundTruth> truth_;
  mutable std::atomic<std::uint64_t> counter_{0};
};

inline const InteractionMatrix& ground_truth_matrix(const ProblemInstance& f) {
  return f.ground_truth();
}

/// Midpoint of each interval moved by a uniform offset within +-25% of the
/// half-range.
inline Vector default_shift(const Bounds& bounds, std::uint64_t seed) {
  Rng rng(seed);
  Vector s(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const double half = 0.5 * bounds[i].width();
    s[i] = bounds[i].mid() + uniform(rng, -0.25 * half, 0.25 * half);
  }
  return s;
}

namespace detail {

inline void validate_structure(const StructureSpec& spec, std::size_t n) {
  if (spec.separable_tail > n) throw StructuralError("separable tail longer than dimension");
  std::vector<std::vector<std::size_t>> owners(n);
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const auto& grp = spec.groups[g];
    if (!(grp.weight > 0.0) || !std::isfinite(grp.weight))
      throw ValidationError("group " + std::to_string(g) + " has non-positive weight");
    if (grp.indices.empty()) throw StructuralError("group " + std::to_string(g) + " is empty");
    if (grp.kind == BaseKind::custom && !grp.custom)
      throw ValidationError("custom group " + std::to_string(g) + " lacks an evaluator");
    if (grp.custom_truth && grp.custom_truth->size() != grp.indices.size())
      throw StructuralError("custom truth of group " + std::to_string(g) + " has wrong size");
    for (Index v : grp.indices) {
      if (v >= n - spec.separable_tail)
        throw StructuralError("group index " + std::to_string(v) + " outside the grouped range");
      if (!owners[v].empty() && owners[v].back() == g)
        throw StructuralError("index " + std::to_string(v) + " repeated within a group");
      owners[v].push_back(g);
    }
  }
  for (std::size_t v = 0; v + spec.separable_tail < n; ++v)
    if (owners[v].empty()) throw StructuralError("index " + std::to_string(v) + " is not covered");
  for (std::size_t v = 0; v < n; ++v) {
    const auto& o = owners[v];
    for (std::size_t a = 0; a < o.size(); ++a)
      for (std::size_t b = a + 1; b < o.size(); ++b) {
        bool declared = false;
        for (const auto& d : spec.overlap) {
          const bool pair = (d.group_a == o[a] && d.group_b == o[b]) ||
                            (d.group_a == o[b] && d.group_b == o[a]);
          if (pair && std::find(d.shared.begin(), d.shared.end(), v) != d.shared.end())
            declared = true;
        }
        if (!declared)
          throw StructuralError("index " + std::to_string(v) + " shared by groups " +
                                std::to_string(o[a]) + " and " + std::to_string(o[b]) +
                                " without an overlap declaration");
      }
  }
}

inline GroundTruth derive_truth(const StructureSpec& spec, std::size_t n) {
  auto direct = InteractionMatrix::identity(n);
  for (const auto& g : spec.groups) {
    if (g.kind != BaseKind::custom && is_separable_kind(g.kind)) continue;
    for (std::size_t a = 0; a < g.indices.size(); ++a)
      for (std::size_t b = a + 1; b < g.indices.size(); ++b)
        if (!g.custom_truth || (*g.custom_truth)(a, b)) direct.link(g.indices[a], g.indices[b]);
  }
  auto indirect = direct.closure();
  return {std::move(direct), std::move(indirect)};
}

}  // namespace detail

/// Assembles h(x) = g(sum_k w_k f_k((x - shift)|group_k) + sum_tail f_tail(x_i - shift_i)).
inline ProblemInstance build_instance(const StructureSpec& spec, MonotoneTransform transform,
                                      std::size_t n, const Bounds& bounds,
                                      std::optional<Vector> shift = std::nullopt,
                                      std::string name = "structured") {
  if (bounds.size() != n) throw ValidationError("bounds size differs from dimension");
  validate_bounds(bounds);
  detail::validate_structure(spec, n);
  if (spec.tail_kind == BaseKind::custom) throw ValidationError("tail kind cannot be custom");
  Vector s = shift ? *shift : Vector(n, 0.0);
  if (s.size() != n) throw ValidationError("shift size differs from dimension");
  if (shift && !is_feasible(s, bounds)) throw ValidationError("shift lies outside the bounds");

  auto truth = detail::derive_truth(spec, n);
  auto evaluator = [spec, transform, n, s = std::move(s)](std::span<const double> x) {
    double total = 0.0;
    Vector z;
    for (const auto& g : spec.groups) {
      z.resize(g.indices.size());
      for (std::size_t k = 0; k < g.indices.size(); ++k) z[k] = x[g.indices[k]] - s[g.indices[k]];
      const double v = g.kind == BaseKind::custom ? g.custom(z) : evaluate_base(g.kind, z);
      total += g.weight * v;
    }
    for (std::size_t i = n - spec.separable_tail; i < n; ++i) {
      const double zi = x[i] - s[i];
      total += evaluate_base(spec.tail_kind, std::span<const double>(&zi, 1));
    }
    return apply_transform(transform, total);
  };
  return ProblemInstance(std::move(name), bounds, std::move(evaluator), std::move(truth));
}

/// Consecutive equally sized blocks; with overlap > 0 block k shares its last
/// `overlap` variables with block k+1 (rosenbrock-style chaining).
inline StructureSpec block_structure(std::size_t blocks, std::size_t block_size, BaseKind kind,
                                     std::size_t separable_tail = 0,
                                     BaseKind tail_kind = BaseKind::sphere,
                                     std::size_t overlap = 0, double weight = 1.0) {
  if (block_size == 0 || overlap >= block_size)
    throw ValidationError("block size must exceed overlap");
  StructureSpec spec;
  std::size_t start = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    GroupSpec g;
    g.kind = kind;
    g.weight = weight;
    for (std::size_t k = 0; k < block_size; ++k) g.indices.push_back(start + k);
    if (b > 0 && overlap > 0) {
      OverlapDecl d{b - 1, b, {}};
      for (std::size_t k = 0; k < overlap; ++k) d.shared.push_back(start + k);
      spec.overlap.push_back(std::move(d));
    }
    spec.groups.push_back(std::move(g));
    start += block_size - overlap;
  }
  spec.separable_tail = separable_tail;
  spec.tail_kind = tail_kind;
  return spec;
}

inline std::size_t block_dimension(std::size_t blocks, std::size_t block_size, std::size_t overlap,
                                   std::size_t tail) {
  if (blocks == 0) return tail;
  return blocks * block_size - (blocks - 1) * overlap + tail;
}

// --- named closed-form fixtures ---------------------------------------------

namespace detail {

inline ProblemInstance custom_fixture(std::string name, Bounds bounds, Evaluator fn,
                                      const Groups& truth_groups) {
  const std::size_t n = bounds.size();
  StructureSpec spec;
  GroupSpec g;
  g.indices = iota_set(n);
  g.kind = BaseKind::custom;
  g.custom = std::move(fn);
  g.custom_truth = InteractionMatrix::from_groups(n, truth_groups);
  spec.groups.push_back(std::move(g));
  return build_instance(spec, MonotoneTransform::identity, n, bounds, Vector(n, 0.0),
                        std::move(name));
}

}  // namespace detail

inline std::vector<std::string> fixture_ids() {
  return {"fbar_c1", "fbar_c2", "fbar_c3", "fbar_c4", "product2", "sum_squares2"};
}

/// Closed-form regression fixtures addressable by id.
inline ProblemInstance make_fixture(const std::string& id) {
  using S = std::span<const double>;
  if (id == "fbar_c1")  // (|x1| + |x2|)^2 on [-5,5]^2, separable
    return detail::custom_fixture(id, uniform_bounds(2, -5, 5), [](S x) {
      const double a = std::abs(x[0]) + std::abs(x[1]);
      return a * a;
    }, {});
  if (id == "fbar_c2")  // (x1 + x2)^2 on [-8,8] x [-2,2]
    return detail::custom_fixture(id, Bounds{{-8, 8}, {-2, 2}}, [](S x) {
      const double a = x[0] + x[1];
      return a * a;
    }, {{0, 1}});
  if (id == "fbar_c3")  // (x1 + x2)^2 * x3 + x4 on [-3,3]^4
    return detail::custom_fixture(id, uniform_bounds(4, -3, 3), [](S x) {
      const double a = x[0] + x[1];
      return a * a * x[2] + x[3];
    }, {{0, 1, 2}});
  if (id == "fbar_c4")  // sqrt(x1^2 + x2^2) + sqrt(x3^2 + x4^2) on [-5,5]^4, separable
    return detail::custom_fixture(id, uniform_bounds(4, -5, 5), [](S x) {
      return std::sqrt(x[0] * x[0] + x[1] * x[1]) + std::sqrt(x[2] * x[2] + x[3] * x[3]);
    }, {});
  if (id == "product2")  // x1 * x2 on [-1,1]^2
    return detail::custom_fixture(id, uniform_bounds(2, -1, 1), [](S x) { return x[0] * x[1]; },
                                  {{0, 1}});
  if (id == "sum_squares2")  // x1^2 + x2^2 on [-5,5]^2
    return detail::custom_fixture(id, uniform_bounds(2, -5, 5),
                                  [](S x) { return x[0] * x[0] + x[1] * x[1]; }, {});
  throw ConfigError("unknown fixture '" + id + "'");
}

// --- structured config --------------------------------------------------------

/// Problem description read from a JSON document:
///
///   {
///     "name": "blocks",            optional
///     "n": 32,                     optional when implied by groups + tail
///     "lower": -100, "upper": 100, or "bounds": [[lo, hi], ...]
///     "groups": [ {"function": "schwefel-1.2", "size": 8, "weight": 1.0,
///                  "indices": [..] (optional; default consecutive)} ],
///     "blocks": {"count": 4, "size": 8, "function": "schwefel-1.2",
///                "overlap": 0, "weight": 1.0}     (alternative to groups)
///     "separable_tail": 0, "tail_function": "sphere",
///     "transform": "identity" | "square" | "sqrt",
///     "shift": "default" | "zero" | [..],
///     "seed": 1
///   }
struct ProblemConfig {
  std::string name = "structured";
  StructureSpec spec;
  MonotoneTransform transform = MonotoneTransform::identity;
  std::size_t n = 0;
  Bounds bounds;
  std::optional<Vector> shift;  // empty means "default" (seeded)
  bool zero_shift = false;
  std::uint64_t seed = 1;
};

inline ProblemConfig parse_problem_config(const nlohmann::json& j) {
  ProblemConfig c;
  try {
    c.name = j.value("name", std::string("structured"));
    c.seed = j.value("seed", std::uint64_t{1});
    c.transform = parse_transform(j.value("transform", std::string("identity")));
    const std::size_t tail = j.value("separable_tail", std::size_t{0});
    const BaseKind tail_kind = parse_base_kind(j.value("tail_function", std::string("sphere")));
    if (j.contains("blocks")) {
      const auto& b = j.at("blocks");
      c.spec = block_structure(b.at("count").get<std::size_t>(), b.at("size").get<std::size_t>(),
                               parse_base_kind(b.value("function", std::string("schwefel-1.2"))),
                               tail, tail_kind, b.value("overlap", std::size_t{0}),
                               b.value("weight", 1.0));
    } else {
      std::size_t next = 0;
      for (const auto& g : j.value("groups", nlohmann::json::array())) {
        GroupSpec gs;
        gs.kind = parse_base_kind(g.value("function", std::string("sphere")));
        if (gs.kind == BaseKind::custom) throw ConfigError("custom groups cannot come from config");
        gs.weight = g.value("weight", 1.0);
        if (g.contains("indices")) {
          gs.indices = g.at("indices").get<VarSet>();
        } else {
          const auto size = g.at("size").get<std::size_t>();
          for (std::size_t k = 0; k < size; ++k) gs.indices.push_back(next + k);
        }
        for (Index v : gs.indices) next = std::max(next, v + 1);
        c.spec.groups.push_back(std::move(gs));
      }
      for (const auto& o : j.value("overlap", nlohmann::json::array()))
        c.spec.overlap.push_back(
            {o.at("a").get<std::size_t>(), o.at("b").get<std::size_t>(), o.at("shared").get<VarSet>()});
      c.spec.separable_tail = tail;
      c.spec.tail_kind = tail_kind;
    }
    std::size_t implied = c.spec.separable_tail;
    for (const auto& g : c.spec.groups)
      for (Index v : g.indices) implied = std::max(implied, v + 1 + c.spec.separable_tail);
    c.n = j.value("n", implied);
    if (j.contains("bounds")) {
      for (const auto& b : j.at("bounds")) c.bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    } else {
      c.bounds = uniform_bounds(c.n, j.value("lower", -100.0), j.value("upper", 100.0));
    }
    if (j.contains("shift")) {
      const auto& s = j.at("shift");
      if (s.is_array()) c.shift = s.get<Vector>();
      else if (s == "zero") c.zero_shift = true;
      else if (s != "default") throw ConfigError("shift must be 'default', 'zero' or an array");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed problem config: ") + e.what());
  }
  return c;
}

inline ProblemInstance build_from_config(const ProblemConfig& c) {
  std::optional<Vector> shift = c.shift;
  if (!shift) shift = c.zero_shift ? Vector(c.n, 0.0) : default_shift(c.bounds, c.seed);
  return build_instance(c.spec, c.transform, c.n, c.bounds, shift, c.name);
}

}  // namespace irrg
