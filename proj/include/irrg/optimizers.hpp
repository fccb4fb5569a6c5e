#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "irrg/common.hpp"

namespace irrg {

struct TracePoint {
  std::uint64_t ffe = 0;
  double best_f = 0.0;
};

struct OptimizerRun {
  Vector best_x;
  double best_f = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t ffe_used = 0;
  std::vector<TracePoint> trace;
};

/// Counts evaluations against a budget, keeps the incumbent and an optional
/// checkpoint trace every `interval` FFEs.
template <class Objective>
class BudgetTracker {
 public:
  BudgetTracker(Objective& f, std::uint64_t budget, std::uint64_t trace_interval = 0)
      : f_(f), budget_(budget), interval_(trace_interval) {}

  bool exhausted() const { return used_ >= budget_; }
  std::uint64_t remaining() const { return budget_ - used_; }
  std::uint64_t used() const { return used_; }

  double operator()(std::span<const double> x) {
    if (exhausted()) throw ValidationError("evaluation budget exceeded");
    const double y = f_(x);
    ++used_;
    offer(x, y);
    if (interval_ > 0 && used_ % interval_ == 0) run_.trace.push_back({used_, run_.best_f});
    return y;
  }

  /// Registers a point whose value is already known (no FFE charged).
  void offer(std::span<const double> x, double y) {
    if (run_.best_x.empty() || y < run_.best_f) {
      run_.best_f = y;
      run_.best_x.assign(x.begin(), x.end());
    }
  }

  OptimizerRun finish() {
    run_.ffe_used = used_;
    if (interval_ > 0 && (run_.trace.empty() || run_.trace.back().ffe != used_) && used_ > 0)
      run_.trace.push_back({used_, run_.best_f});
    return std::move(run_);
  }

 private:
  Objective& f_;
  std::uint64_t budget_;
  std::uint64_t interval_;
  std::uint64_t used_ = 0;
  OptimizerRun run_;
};

// --- SHADE ----------------------------------------------------------------------

struct ShadeConfig {
  std::size_t pop_size = 100;
  double arc_ratio = 2.0;
  double pbest_ratio = 0.1;
  std::size_t memory_size = 1000;
  std::uint64_t seed = 1;
  std::uint64_t trace_interval = 0;

  void validate() const {
    if (pop_size < 4) throw ValidationError("SHADE population must be at least 4");
    if (!(arc_ratio > 0.0)) throw ValidationError("SHADE archive ratio must be positive");
    if (!(pbest_ratio > 0.0 && pbest_ratio <= 1.0)) throw ValidationError("pbest ratio must lie in (0,1]");
    if (memory_size < 1) throw ValidationError("SHADE memory size must be at least 1");
  }
};

/// Success-history based adaptive DE (current-to-pbest/1/bin with archive).
template <class Objective>
OptimizerRun shade_optimize(Objective&& f, const Bounds& bounds, std::uint64_t budget,
                            const ShadeConfig& config = {}) {
  config.validate();
  validate_bounds(bounds);
  const std::size_t np = config.pop_size;
  const std::size_t n = bounds.size();
  if (budget < np) throw ValidationError("SHADE budget smaller than population size");

  Rng rng(config.seed);
  BudgetTracker<std::remove_reference_t<Objective>> eval(f, budget, config.trace_interval);
  std::vector<Vector> pop(np);
  Vector fit(np);
  for (std::size_t i = 0; i < np; ++i) {
    pop[i] = random_point(bounds, rng);
    fit[i] = eval(pop[i]);
  }

  const std::size_t h = config.memory_size;
  Vector m_cr(h, 0.5), m_f(h, 0.5);
  std::size_t k = 0;
  std::vector<Vector> archive;
  const auto archive_max = static_cast<std::size_t>(std::lround(config.arc_ratio * static_cast<double>(np)));
  const std::size_t p_count =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(config.pbest_ratio * static_cast<double>(np))));

  std::vector<std::size_t> order(np);
  Vector trial(n);
  while (!eval.exhausted()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

    Vector s_cr, s_f, s_df;
    std::vector<Vector> next = pop;
    Vector next_fit = fit;
    for (std::size_t i = 0; i < np && !eval.exhausted(); ++i) {
      const std::size_t r = uniform_index(rng, h);
      const double cr = std::clamp(m_cr[r] + 0.1 * standard_normal(rng), 0.0, 1.0);
      double fi;
      do {
        fi = cauchy(rng, m_f[r], 0.1);
      } while (fi <= 0.0);
      fi = std::min(fi, 1.0);

      const std::size_t pbest = order[uniform_index(rng, std::min(p_count, np))];
      std::size_t r1;
      do {
        r1 = uniform_index(rng, np);
      } while (r1 == i);
      std::size_t r2;
      do {
        r2 = uniform_index(rng, np + archive.size());
      } while (r2 == i || r2 == r1);
      const Vector& x_r2 = r2 < np ? pop[r2] : archive[r2 - np];

      const std::size_t jrand = uniform_index(rng, n);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == jrand || uniform01(rng) < cr) {
          double v = pop[i][j] + fi * (pop[pbest][j] - pop[i][j]) + fi * (pop[r1][j] - x_r2[j]);
          if (v < bounds[j].lo) v = 0.5 * (bounds[j].lo + pop[i][j]);
          if (v > bounds[j].hi) v = 0.5 * (bounds[j].hi + pop[i][j]);
          trial[j] = bounds[j].clamp(v);
        } else {
          trial[j] = pop[i][j];
        }
      }
      const double ft = eval(trial);
      if (ft <= fit[i]) {
        if (ft < fit[i]) {
          archive.push_back(pop[i]);
          s_cr.push_back(cr);
          s_f.push_back(fi);
          s_df.push_back(fit[i] - ft);
        }
        next[i] = trial;
        next_fit[i] = ft;
      }
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    while (archive.size() > archive_max) {
      const std::size_t victim = uniform_index(rng, archive.size());
      archive[victim] = std::move(archive.back());
      archive.pop_back();
    }
    if (!s_cr.empty()) {
      double wsum = 0.0;
      for (double d : s_df) wsum += d;
      double mcr = 0.0, num = 0.0, den = 0.0;
      for (std::size_t s = 0; s < s_cr.size(); ++s) {
        const double w = wsum > 0.0 ? s_df[s] / wsum : 1.0 / static_cast<double>(s_cr.size());
        mcr += w * s_cr[s];
        num += w * s_f[s] * s_f[s];
        den += w * s_f[s];
      }
      m_cr[k] = mcr;
      if (den > 0.0) m_f[k] = num / den;
      k = (k + 1) % h;
    }
  }
  return eval.finish();
}

// --- MTS-LS1 --------------------------------------------------------------------

struct MtsLs1Config {
  double step_fraction = 0.2;  // initial search range relative to each variable's range
  std::uint64_t trace_interval = 0;

  void validate() const {
    if (!(step_fraction > 0.0 && step_fraction <= 1.0))
      throw ValidationError("MTS-LS1 step fraction must lie in (0,1]");
  }
};

/// Coordinate-wise local search: per variable, try x - SR, then x + SR/2,
/// halve SR when both fail. A step that has shrunk below 1e-15 of the range
/// restarts at 40% of the range.
template <class Objective>
OptimizerRun mts_ls1(Objective&& f, const Bounds& bounds, std::span<const double> start,
                     std::uint64_t budget, const MtsLs1Config& config = {},
                     std::optional<double> start_f = std::nullopt) {
  config.validate();
  validate_bounds(bounds);
  if (!is_feasible(start, bounds)) throw ValidationError("MTS-LS1 start point is infeasible");
  const std::size_t n = bounds.size();
  BudgetTracker<std::remove_reference_t<Objective>> eval(f, budget, config.trace_interval);
  Vector x(start.begin(), start.end());
  double fx;
  if (start_f) {
    fx = *start_f;
    eval.offer(x, fx);
  } else if (budget > 0) {
    fx = eval(x);
  } else {
    OptimizerRun run;
    run.best_x = x;
    return run;  // nothing evaluated; best_f stays NaN
  }

  Vector step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = config.step_fraction * bounds[i].width();

  bool progress = true;
  while (!eval.exhausted() && progress) {
    progress = false;
    for (std::size_t i = 0; i < n && !eval.exhausted(); ++i) {
      const double orig = x[i];
      bool improved = false;
      x[i] = bounds[i].clamp(orig - step[i]);
      if (x[i] != orig) {
        const double y = eval(x);
        if (y < fx) {
          fx = y;
          improved = true;
        }
      }
      if (!improved) {
        x[i] = orig;
        if (eval.exhausted()) break;
        x[i] = bounds[i].clamp(orig + 0.5 * step[i]);
        if (x[i] != orig) {
          const double y = eval(x);
          if (y < fx) {
            fx = y;
            improved = true;
          }
        }
        if (!improved) {
          x[i] = orig;
          step[i] *= 0.5;
          if (step[i] < 1e-15 * bounds[i].width()) step[i] = 0.4 * bounds[i].width();
        }
      }
      progress = true;
    }
  }
  return eval.finish();
}

// --- covariance-adapting evolution strategy --------------------------------------

struct EsConfig {
  std::size_t lambda = 0;            // 0 selects 4 + floor(3 ln n)
  double sigma0_fraction = 0.3;      // initial step relative to the mean variable range
  std::size_t full_covariance_max_dim = 100;
  std::uint64_t trace_interval = 0;
  /// Restart from a random point once the search has stalled (step or
  /// fitness spread below tolerance); the population grows by lambda_growth.
  bool restarts = true;
  std::size_t lambda_growth = 1;
  double tol_fun = 1e-12;  // relative to the magnitude of the best value
  double tol_x = 1e-12;  // relative to the mean variable range
};

/// (mu/mu_w, lambda) CMA-ES with rank-one and rank-mu updates. Above
/// `full_covariance_max_dim` only the diagonal of C is adapted. The object is
/// resumable: run() may stop mid-generation and continue on the next call.
class CmaEs {
 public:
  CmaEs(Vector mean, Bounds bounds, const EsConfig& config, std::uint64_t seed)
      : bounds_(std::move(bounds)), rng_(seed), n_(mean.size()) {
    if (n_ == 0) throw ValidationError("ES needs at least one dimension");
    if (bounds_.size() != n_) throw ValidationError("ES bounds dimension mismatch");
    validate_bounds(bounds_);
    if (!is_feasible(mean, bounds_)) throw ValidationError("ES start point is infeasible");
    const double nd = static_cast<double>(n_);
    restarts_ = config.restarts;
    lambda_growth_ = std::max<std::size_t>(config.lambda_growth, 1);
    tol_fun_ = config.tol_fun;
    diagonal_ = n_ > config.full_covariance_max_dim;
    for (const auto& b : bounds_) avg_width_ += b.width();
    avg_width_ /= nd;
    sigma0_ = config.sigma0_fraction * avg_width_;
    tol_x_ = config.tol_x * avg_width_;
    configure(config.lambda ? config.lambda : 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(nd))));
    mean_ = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(n_));
    reset_state();
  }

  std::size_t dimension() const { return n_; }
  std::size_t lambda() const { return lambda_; }
  double sigma() const { return sigma_; }
  void set_sigma(double s) { sigma_ = s; }
  bool uses_diagonal() const { return diagonal_; }
  std::uint64_t generations() const { return generation_; }
  std::size_t restart_count() const { return restart_count_; }

  Vector mean() const { return Vector(mean_.data(), mean_.data() + n_); }

  /// Re-centres the search (keeps step size and covariance).
  void set_mean(std::span<const double> m) {
    if (m.size() != n_) throw ValidationError("ES mean dimension mismatch");
    mean_ = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Eigen::Index>(n_));
  }

  struct Progress {
    std::uint64_t evaluations = 0;
    std::uint64_t generations = 0;
    Vector best_x;  // best point evaluated during this call
    double best_f = std::numeric_limits<double>::infinity();
  };

  /// Evaluates candidates until `max_evals` evaluations or `max_generations`
  /// completed generations, whichever comes first.
  template <class Objective>
  Progress run(Objective&& f, std::uint64_t max_evals,
               std::uint64_t max_generations = std::numeric_limits<std::uint64_t>::max()) {
    Progress p;
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) return p;  // degenerate: no spread
    while (p.evaluations < max_evals && p.generations < max_generations) {
      if (pending_ == 0 && fitness_.empty()) sample_generation();
      while (pending_ < lambda_ && p.evaluations < max_evals) {
        const Vector x(arx_[pending_].data(), arx_[pending_].data() + n_);
        const double y = f(std::span<const double>(x));
        ++p.evaluations;
        fitness_.push_back(y);
        if (p.best_x.empty() || y < p.best_f) {
          p.best_f = y;
          p.best_x = x;
        }
        ++pending_;
      }
      if (pending_ < lambda_) break;
      update();
      ++p.generations;
      if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) break;
    }
    return p;
  }

 private:
  void configure(std::size_t lambda) {
    const double nd = static_cast<double>(n_);
    lambda_ = std::max<std::size_t>(lambda, 2);
    mu_ = lambda_ / 2;
    weights_.assign(mu_, 0.0);
    for (std::size_t i = 0; i < mu_; ++i)
      weights_[i] = std::log(static_cast<double>(lambda_) / 2.0 + 0.5) - std::log(static_cast<double>(i) + 1.0);
    const double wsum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    double w2 = 0.0;
    for (auto& w : weights_) {
      w /= wsum;
      w2 += w * w;
    }
    mueff_ = 1.0 / w2;
    cc_ = (4.0 + mueff_ / nd) / (nd + 4.0 + 2.0 * mueff_ / nd);
    cs_ = (mueff_ + 2.0) / (nd + mueff_ + 5.0);
    c1_ = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff_);
    cmu_ = std::min(1.0 - c1_, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) / ((nd + 2.0) * (nd + 2.0) + mueff_));
    if (diagonal_) {
      c1_ = std::min(1.0, c1_ * (nd + 2.0) / 3.0);
      cmu_ = std::min(1.0 - c1_, cmu_ * (nd + 2.0) / 3.0);
    }
    damps_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (nd + 1.0)) - 1.0) + cs_;
    chi_n_ = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
    history_len_ = 10 + static_cast<std::size_t>(std::ceil(30.0 * nd / static_cast<double>(lambda_)));
  }

  void reset_state() {
    const auto n = static_cast<Eigen::Index>(n_);
    sigma_ = sigma0_;
    pc_ = Eigen::VectorXd::Zero(n);
    ps_ = pc_;
    C_ = Eigen::MatrixXd::Identity(n, n);
    B_ = C_;
    D_ = Eigen::VectorXd::Ones(n);
    best_history_.clear();
    restart_generation_ = generation_;
    evals_since_eigen_ = 0;
  }

  bool stalled(double gen_spread) const {
    if (sigma_ * D_.maxCoeff() < tol_x_) return true;
    if (best_history_.size() < history_len_) return false;
    const auto [lo, hi] = std::minmax_element(best_history_.begin(), best_history_.end());
    return std::max(*hi - *lo, gen_spread) < tol_fun_ * std::abs(best_history_.back());
  }

  void restart() {
    configure(lambda_growth_ * lambda_);
    Vector x = random_point(bounds_, rng_);
    mean_ = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n_));
    reset_state();
    ++restart_count_;
  }

  void sample_generation() {
    arz_.assign(lambda_, Eigen::VectorXd(static_cast<Eigen::Index>(n_)));
    arx_.assign(lambda_, Eigen::VectorXd(static_cast<Eigen::Index>(n_)));
    for (std::size_t k = 0; k < lambda_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) arz_[k](static_cast<Eigen::Index>(i)) = standard_normal(rng_);
      Eigen::VectorXd y = diagonal_ ? Eigen::VectorXd(D_.cwiseProduct(arz_[k])) : Eigen::VectorXd(B_ * D_.cwiseProduct(arz_[k]));
      Eigen::VectorXd x = mean_ + sigma_ * y;
      for (std::size_t i = 0; i < n_; ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        x(e) = bounds_[i].clamp(x(e));
      }
      arx_[k] = x;
    }
    pending_ = 0;
    fitness_.clear();
  }

  void update() {
    const double nd = static_cast<double>(n_);
    std::vector<std::size_t> idx(lambda_);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fitness_[a] < fitness_[b]; });

    const Eigen::VectorXd old_mean = mean_;
    mean_.setZero();
    for (std::size_t i = 0; i < mu_; ++i) mean_ += weights_[i] * arx_[idx[i]];

    const Eigen::VectorXd y_w = (mean_ - old_mean) / sigma_;
    // C^{-1/2} y_w
    Eigen::VectorXd inv_sqrt_y;
    if (diagonal_) {
      inv_sqrt_y = y_w.cwiseQuotient(D_);
    } else {
      inv_sqrt_y = B_ * (B_.transpose() * y_w).cwiseQuotient(D_);
    }
    ps_ = (1.0 - cs_) * ps_ + std::sqrt(cs_ * (2.0 - cs_) * mueff_) * inv_sqrt_y;
    const double gen = static_cast<double>(generation_ - restart_generation_ + 1);
    const double ps_norm = ps_.norm();
    const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * gen)) / chi_n_ < 1.4 + 2.0 / (nd + 1.0);
    pc_ = (1.0 - cc_) * pc_ + (hsig ? std::sqrt(cc_ * (2.0 - cc_) * mueff_) : 0.0) * y_w;

    const double delta_hsig = hsig ? 0.0 : cc_ * (2.0 - cc_);
    if (diagonal_) {
      Eigen::VectorXd cdiag = C_.diagonal();
      Eigen::VectorXd rank_mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
      for (std::size_t i = 0; i < mu_; ++i) {
        const Eigen::VectorXd d = (arx_[idx[i]] - old_mean) / sigma_;
        rank_mu += weights_[i] * d.cwiseProduct(d);
      }
      cdiag = (1.0 - c1_ - cmu_) * cdiag + c1_ * (pc_.cwiseProduct(pc_) + delta_hsig * cdiag) + cmu_ * rank_mu;
      C_.diagonal() = cdiag;
      D_ = cdiag.cwiseMax(1e-300).cwiseSqrt();
    } else {
      Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
      for (std::size_t i = 0; i < mu_; ++i) {
        const Eigen::VectorXd d = (arx_[idx[i]] - old_mean) / sigma_;
        rank_mu += weights_[i] * d * d.transpose();
      }
      C_ = (1.0 - c1_ - cmu_) * C_ + c1_ * (pc_ * pc_.transpose() + delta_hsig * C_) + cmu_ * rank_mu;
      evals_since_eigen_ += lambda_;
      if (static_cast<double>(evals_since_eigen_) > static_cast<double>(lambda_) / (c1_ + cmu_) / nd / 10.0) {
        decompose();
        evals_since_eigen_ = 0;
      }
    }
    sigma_ *= std::exp((cs_ / damps_) * (ps_norm / chi_n_ - 1.0));
    sigma_ = std::min(sigma_, 1e300);
    ++generation_;
    const double gen_best = fitness_[idx.front()];
    const double gen_spread = fitness_[idx.back()] - gen_best;
    pending_ = 0;
    fitness_.clear();
    if (restarts_) {
      best_history_.push_back(gen_best);
      if (best_history_.size() > history_len_) best_history_.pop_front();
      if (stalled(gen_spread) || !(sigma_ > 0.0) || !std::isfinite(sigma_)) restart();
    }
  }

  void decompose() {
    C_ = C_.triangularView<Eigen::Upper>();
    C_ = C_.selfadjointView<Eigen::Upper>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C_);
    if (es.info() != Eigen::Success) return;
    B_ = es.eigenvectors();
    D_ = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
  }

  Bounds bounds_;
  Rng rng_;
  std::size_t n_;
  std::size_t lambda_ = 0, mu_ = 0;
  std::vector<double> weights_;
  double mueff_ = 0, cc_ = 0, cs_ = 0, c1_ = 0, cmu_ = 0, damps_ = 0, chi_n_ = 0;
  double sigma_ = 0, sigma0_ = 0, avg_width_ = 0;
  bool diagonal_ = false;
  bool restarts_ = true;
  std::size_t lambda_growth_ = 1;
  double tol_fun_ = 0, tol_x_ = 0;
  std::size_t history_len_ = 0;
  std::deque<double> best_history_;
  std::uint64_t restart_generation_ = 0;
  std::size_t restart_count_ = 0;
  Eigen::VectorXd mean_, pc_, ps_, D_;
  Eigen::MatrixXd C_, B_;
  std::vector<Eigen::VectorXd> arz_, arx_;
  std::vector<double> fitness_;
  std::size_t pending_ = 0;
  std::uint64_t generation_ = 0;
  std::uint64_t evals_since_eigen_ = 0;
};

enum class StopUnit { evaluations, iterations };

/// Standalone run of the ES on a (possibly restricted) objective. The start
/// point defaults to a uniform draw from the seed's first sub-stream and is
/// evaluated first; the ES itself draws from the second sub-stream.
template <class Objective>
OptimizerRun es_component_optimize(Objective&& f, const Bounds& bounds, std::uint64_t budget,
                                   std::uint64_t seed, const EsConfig& config = {},
                                   std::optional<Vector> start = std::nullopt,
                                   StopUnit unit = StopUnit::evaluations,
                                   std::uint64_t max_iterations = 0) {
  validate_bounds(bounds);
  if (bounds.empty()) throw ValidationError("component dimension must be at least 1");
  Vector x0;
  if (start) {
    x0 = *start;
  } else {
    Rng rng(derive_seed(seed, 0));
    x0 = random_point(bounds, rng);
  }
  BudgetTracker<std::remove_reference_t<Objective>> eval(f, budget, config.trace_interval);
  if (budget == 0) {
    OptimizerRun run;
    run.best_x = x0;
    return run;
  }
  eval(x0);
  CmaEs es(x0, bounds, config, derive_seed(seed, 1));
  const std::uint64_t gens =
      unit == StopUnit::iterations ? max_iterations : std::numeric_limits<std::uint64_t>::max();
  es.run(eval, eval.remaining(), gens);
  return eval.finish();
}

struct BootstrapConfig {
  std::uint64_t global_ffe = 5000;
  std::uint64_t local_ffe = 15000;
  ShadeConfig shade;
  MtsLs1Config mts;
};

/// Global search (SHADE) followed by local search (MTS-LS1) from its best
/// point. With both budgets at zero the result is a uniform random point.
template <class Objective>
OptimizerRun find_xhq(Objective&& f, const Bounds& bounds, const BootstrapConfig& config,
                      std::uint64_t seed) {
  OptimizerRun out;
  std::optional<double> known;
  if (config.global_ffe > 0) {
    ShadeConfig sc = config.shade;
    sc.seed = derive_seed(seed, 11);
    sc.pop_size = std::max<std::size_t>(4, std::min<std::size_t>(sc.pop_size, config.global_ffe));
    const auto g = shade_optimize(f, bounds, std::max<std::uint64_t>(config.global_ffe, sc.pop_size), sc);
    out.best_x = g.best_x;
    known = g.best_f;
    out.ffe_used += g.ffe_used;
  } else {
    Rng rng(derive_seed(seed, 12));
    out.best_x = random_point(bounds, rng);
  }
  out.best_f = known.value_or(std::numeric_limits<double>::quiet_NaN());
  if (config.local_ffe > 0) {
    const auto l = mts_ls1(f, bounds, out.best_x, config.local_ffe, config.mts, known);
    out.ffe_used += l.ffe_used;
    if (!l.best_x.empty()) {
      out.best_x = l.best_x;
      out.best_f = l.best_f;
    }
  }
  return out;
}

}  // namespace irrg
