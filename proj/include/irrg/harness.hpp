#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "irrg/baselines.hpp"
#include "irrg/benchmark.hpp"
#include "irrg/cc.hpp"
#include "irrg/decomposition.hpp"
#include "irrg/irrg.hpp"
#include "irrg/metrics.hpp"
#include "irrg/optimizers.hpp"
#include "irrg/routing.hpp"
#include "irrg/stats.hpp"

namespace irrg::harness {

using json = nlohmann::json;

inline json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open '" + p.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

/// Builds a fresh instance from a problem reference: a fixture id, a path to
/// a JSON document (structured problem or routing instance), or an inline
/// JSON object of either kind.
inline ProblemInstance resolve_problem(const json& ref) {
  json doc;
  std::string name;
  if (ref.is_string()) {
    const auto id = ref.get<std::string>();
    for (const auto& f : fixture_ids())
      if (f == id) return make_fixture(id);
    if (!std::filesystem::exists(id)) throw ConfigError("unknown problem '" + id + "'");
    doc = read_json_file(id);
    name = std::filesystem::path(id).stem().string();
  } else if (ref.is_object()) {
    doc = ref;
  } else {
    throw ConfigError("problem must be a fixture id, a file path or an object");
  }
  if (doc.contains("demands") && doc.contains("links"))
    return routing::as_problem(routing::from_json(doc), doc.value("name", name.empty() ? "routing" : name));
  auto cfg = parse_problem_config(doc);
  if (!doc.contains("name") && !name.empty()) cfg.name = name;
  return build_from_config(cfg);
}

// --- configuration -------------------------------------------------------------------

struct DecomposerConfig {
  std::string name = "irrg";  // irrg | rdg3 | fvil | whole | none
  IrrgConfig irrg;
  Rdg3Config rdg3;
  FvilConfig fvil;
  std::size_t eps_s = 100;
};

inline DecomposerConfig parse_decomposer(const json& j) {
  DecomposerConfig d;
  if (j.is_string()) {
    d.name = j.get<std::string>();
  } else if (j.is_object()) {
    d.name = j.value("name", std::string("irrg"));
    d.eps_s = j.value("eps_s", std::size_t{100});
    d.irrg.n_s = j.value("n_s", d.irrg.n_s);
    d.irrg.eps_sti = j.value("eps_sti", d.irrg.eps_sti);
    d.irrg.bootstrap_global_ffe = j.value("bootstrap_global_ffe", d.irrg.bootstrap_global_ffe);
    d.irrg.bootstrap_local_ffe = j.value("bootstrap_local_ffe", d.irrg.bootstrap_local_ffe);
    d.rdg3.eps_n = j.value("eps_n", d.rdg3.eps_n);
    d.fvil.N = j.value("N", d.fvil.N);
  } else {
    throw ConfigError("decomposer must be a name or an object");
  }
  d.irrg.eps_s = d.rdg3.eps_s = d.fvil.eps_s = d.eps_s;
  static const std::vector<std::string> known{"irrg", "rdg3", "fvil", "whole", "none"};
  if (std::find(known.begin(), known.end(), d.name) == known.end())
    throw ConfigError("unknown decomposer '" + d.name + "'");
  d.irrg.validate();
  d.rdg3.validate();
  d.fvil.validate();
  return d;
}

struct FrameworkConfig {
  std::string name = "cbcc";  // cbcc | ccfr2 | es
  std::optional<double> w;
  std::optional<std::uint64_t> round_unit;
};

inline FrameworkConfig parse_framework_config(const json& j) {
  FrameworkConfig f;
  if (j.is_string()) {
    f.name = j.get<std::string>();
  } else if (j.is_object()) {
    f.name = j.value("name", std::string("cbcc"));
    if (j.contains("w")) f.w = j.at("w").get<double>();
    if (j.contains("round_unit")) f.round_unit = j.at("round_unit").get<std::uint64_t>();
  } else {
    throw ConfigError("framework must be a name or an object");
  }
  if (f.name != "cbcc" && f.name != "ccfr2" && f.name != "es")
    throw ConfigError("unknown framework '" + f.name + "'");
  return f;
}

/// One experiment:
///
///   {
///     "name": "blocks-cbcc",
///     "kind": "decomposition" | "optimization",
///     "problem": "<fixture id>" | "<path.json>" | { problem document },
///     "decomposer": "irrg" | { "name": "irrg", "n_s": 10, "eps_sti": 15, "eps_s": 100,
///                              "bootstrap_global_ffe": 5000, "bootstrap_local_ffe": 15000,
///                              "eps_n": 50, "N": 10 },
///     "framework": "cbcc" | "ccfr2" | "es" | { "name": "cbcc", "w": 0.5, "round_unit": 1000 },
///     "budget": 100000,
///     "repetitions": 25,
///     "seed": 1,
///     "trace_interval": 1000
///   }
struct ExperimentConfig {
  std::string name = "experiment";
  std::string kind = "optimization";
  json problem;
  DecomposerConfig decomposer;
  FrameworkConfig framework;
  std::uint64_t budget = 0;
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  std::uint64_t trace_interval = 0;
  json source;  // canonical document, used for the fingerprint

  std::string fingerprint() const {
    const std::string s = source.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    std::ostringstream o;
    o << std::hex;
    o.width(16);
    o.fill('0');
    o << h;
    return o.str();
  }
};

inline ExperimentConfig parse_experiment(const json& j) {
  ExperimentConfig c;
  try {
    c.name = j.value("name", std::string("experiment"));
    c.kind = j.value("kind", std::string("optimization"));
    if (c.kind != "decomposition" && c.kind != "optimization")
      throw ConfigError("kind must be 'decomposition' or 'optimization'");
    c.problem = j.at("problem");
    c.decomposer = parse_decomposer(j.value("decomposer", json("irrg")));
    c.framework = parse_framework_config(j.value("framework", json("cbcc")));
    c.budget = j.value("budget", std::uint64_t{0});
    c.repetitions = j.value("repetitions", std::size_t{1});
    c.seed = j.value("seed", std::uint64_t{1});
    c.trace_interval = j.value("trace_interval", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  if (c.repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (c.kind == "optimization" && c.budget == 0) throw ConfigError("optimization needs a positive budget");
  if (c.framework.name == "es" && c.decomposer.name != "none" && c.decomposer.name != "whole")
    throw ConfigError("the monolithic es framework takes no decomposer (use \"none\")");
  c.source = j;
  return c;
}

inline std::vector<ExperimentConfig> parse_experiments(const json& j) {
  std::vector<ExperimentConfig> out;
  if (j.contains("experiments")) {
    for (const auto& e : j.at("experiments")) out.push_back(parse_experiment(e));
  } else {
    out.push_back(parse_experiment(j));
  }
  return out;
}

// --- records ----------------------------------------------------------------------------

struct RunRecord {
  std::string experiment;
  std::string problem;
  std::string decomposer;
  std::string framework;
  std::string fingerprint;
  std::uint64_t seed = 0;
  std::optional<Decomposition> decomposition;
  std::optional<AccuracyScores> scores;
  std::optional<double> best_f;
  std::uint64_t ffe_decomposition = 0;
  std::uint64_t ffe_optimization = 0;
  bool flagged = false;  // budget ran out during decomposition
  std::vector<TracePoint> trace;
  std::vector<CcTraceRow> cc_trace;
  double wall_time_s = 0.0;  // kept out of the JSON document

  json to_json() const {
    json j;
    j["experiment"] = experiment;
    j["problem"] = problem;
    j["decomposer"] = decomposer;
    j["framework"] = framework;
    j["fingerprint"] = fingerprint;
    j["seed"] = seed;
    if (decomposition) {
      json d = decomposition->to_json();
      std::vector<std::size_t> sizes;
      for (const auto& g : decomposition->nonseps) sizes.push_back(g.size());
      d["nonseps_sizes"] = sizes;
      j["decomposition"] = d;
    } else {
      j["decomposition"] = nullptr;
    }
    j["scores"] = scores ? scores->to_json() : json(nullptr);
    if (best_f && std::isfinite(*best_f))
      j["best_f"] = *best_f;
    else if (best_f)
      j["best_f"] = *best_f > 0 ? "inf" : "-inf";
    else
      j["best_f"] = nullptr;
    j["ffe_decomposition"] = ffe_decomposition;
    j["ffe_optimization"] = ffe_optimization;
    j["flagged"] = flagged;
    return j;
  }

  static RunRecord from_json(const json& j) {
    RunRecord r;
    try {
      r.experiment = j.value("experiment", std::string());
      r.problem = j.value("problem", std::string());
      r.decomposer = j.value("decomposer", std::string());
      r.framework = j.value("framework", std::string());
      r.fingerprint = j.value("fingerprint", std::string());
      r.seed = j.value("seed", std::uint64_t{0});
      if (j.contains("best_f") && !j.at("best_f").is_null()) {
        const auto& b = j.at("best_f");
        if (b.is_string())
          r.best_f = b.get<std::string>() == "-inf" ? -std::numeric_limits<double>::infinity()
                                                    : std::numeric_limits<double>::infinity();
        else
          r.best_f = b.get<double>();
      }
      if (j.contains("decomposition") && !j.at("decomposition").is_null())
        r.decomposition = Decomposition::from_json(j.at("decomposition"));
      r.ffe_decomposition = j.value("ffe_decomposition", std::uint64_t{0});
      r.ffe_optimization = j.value("ffe_optimization", std::uint64_t{0});
      r.flagged = j.value("flagged", false);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed run record: ") + e.what());
    }
    return r;
  }
};

inline void write_trace_csv(std::ostream& out, const std::vector<TracePoint>& trace) {
  out << "ffe,best_f\n";
  out.precision(17);
  for (const auto& t : trace) out << t.ffe << ',' << t.best_f << '\n';
}

// --- single runs ---------------------------------------------------------------------------

/// Runs the configured decomposer on `f`. A cap limits IRRG; other
/// decomposers run to completion and the caller checks the cost.
inline Decomposition decompose(const ProblemInstance& f, const DecomposerConfig& config, std::uint64_t seed,
                               std::optional<std::uint64_t> cap = std::nullopt) {
  const std::size_t n = f.dimension();
  if (config.name == "irrg") {
    IrrgConfig c = config.irrg;
    c.seed = seed;
    c.max_ffe = cap;
    return irrg(f, c);
  }
  if (config.name == "rdg3") {
    auto d = rdg3_decompose(f, config.rdg3);
    d.seed = seed;
    return d;
  }
  if (config.name == "fvil") {
    FvilConfig c = config.fvil;
    c.seed = seed;
    return fvil_decompose(f, c);
  }
  Decomposition d;  // whole / none: one component holding every variable
  d.seed = seed;
  if (n == 1)
    d.seps = {{0}};
  else
    d.nonseps = {iota_set(n)};
  return d;
}

inline std::optional<AccuracyScores> score_against_truth(const ProblemInstance& f, const Decomposition& d) {
  if (!f.has_ground_truth()) return std::nullopt;
  return score(decomposition_matrix(f.dimension(), d), f.ground_truth());
}

inline RunRecord run_once(const ExperimentConfig& config, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemInstance f = resolve_problem(config.problem);
  RunRecord r;
  r.experiment = config.name;
  r.problem = f.name();
  r.decomposer = config.decomposer.name;
  r.framework = config.kind == "optimization" ? config.framework.name : "";
  r.fingerprint = config.fingerprint();
  r.seed = seed;

  const bool optimize = config.kind == "optimization";
  const bool monolithic = optimize && config.framework.name == "es";
  Decomposition d;
  if (!monolithic) {
    const std::optional<std::uint64_t> cap = optimize ? std::optional<std::uint64_t>(config.budget) : std::nullopt;
    d = decompose(f, config.decomposer, seed, cap);
    r.ffe_decomposition = d.ffe_cost;
    r.decomposition = d;
    if (config.decomposer.name != "whole" && config.decomposer.name != "none") r.scores = score_against_truth(f, d);
  }
  if (optimize) {
    if (d.budget_exhausted || r.ffe_decomposition >= config.budget) {
      r.flagged = true;
    } else {
      const std::uint64_t budget = config.budget - r.ffe_decomposition;
      const std::uint64_t before = f.evaluations();
      auto objective = [&f](std::span<const double> x) { return f.evaluate(x); };
      if (monolithic) {
        EsConfig es;
        es.trace_interval = config.trace_interval;
        const auto run = es_component_optimize(objective, f.bounds(), budget, derive_seed(seed, 7), es);
        r.best_f = run.best_f;
        r.trace = run.trace;
      } else {
        CcConfig cc = config.framework.name == "cbcc" ? CcConfig::cbcc(budget, derive_seed(seed, 7))
                                                      : CcConfig::ccfr2(budget, derive_seed(seed, 7));
        if (config.framework.w) cc.w = *config.framework.w;
        if (config.framework.round_unit) cc.round_unit = *config.framework.round_unit;
        const auto res = cc_run(objective, f.bounds(), d, cc);
        r.best_f = res.run.best_f;
        r.trace = res.run.trace;
        r.cc_trace = res.trace;
      }
      r.ffe_optimization = f.evaluations() - before;
    }
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Repetitions use seeds seed, seed+1, ...; `threads` > 1 runs them concurrently.
inline std::vector<RunRecord> run_experiment(const ExperimentConfig& config, std::size_t threads = 1) {
  std::vector<RunRecord> out(config.repetitions);
  if (threads <= 1) {
    for (std::size_t i = 0; i < config.repetitions; ++i) out[i] = run_once(config, config.seed + i);
    return out;
  }
  for (std::size_t start = 0; start < config.repetitions; start += threads) {
    std::vector<std::future<RunRecord>> jobs;
    for (std::size_t i = start; i < std::min(config.repetitions, start + threads); ++i)
      jobs.push_back(std::async(std::launch::async, run_once, std::cref(config), config.seed + i));
    for (std::size_t k = 0; k < jobs.size(); ++k) out[start + k] = jobs[k].get();
  }
  return out;
}

inline std::vector<RunRecord> run_decomposition_experiment(ExperimentConfig config, std::size_t threads = 1) {
  config.kind = "decomposition";
  return run_experiment(config, threads);
}

inline std::vector<RunRecord> run_optimization_experiment(ExperimentConfig config, std::size_t threads = 1) {
  config.kind = "optimization";
  if (config.budget == 0) throw ConfigError("optimization needs a positive budget");
  return run_experiment(config, threads);
}

// --- summaries and comparisons ----------------------------------------------------------------

inline std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  std::ostringstream o;
  o.precision(6);
  o << std::scientific << v;
  return o.str();
}

inline std::string summary_csv_header() {
  return "experiment,problem,decomposer,framework,runs,flagged,med,avg,std,rho1_avg,rho2_avg,rho3_avg\n";
}

/// One CSV row: best-fitness Med/Avg/Std and mean accuracy scores.
inline std::string summary_csv_row(const std::vector<RunRecord>& records) {
  if (records.empty()) throw ValidationError("no records to summarize");
  const auto& r0 = records.front();
  Vector best;
  std::size_t flagged = 0;
  double rho[3] = {0, 0, 0};
  std::size_t rho_n[3] = {0, 0, 0};
  for (const auto& r : records) {
    flagged += r.flagged;
    if (r.best_f) best.push_back(*r.best_f);
    if (r.scores) {
      if (r.scores->rho1) rho[0] += *r.scores->rho1, ++rho_n[0];
      if (r.scores->rho2) rho[1] += *r.scores->rho2, ++rho_n[1];
      rho[2] += r.scores->rho3, ++rho_n[2];
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SampleSummary s{nan, nan, nan};
  if (!best.empty()) s = summarize(best);
  std::ostringstream o;
  o << r0.experiment << ',' << r0.problem << ',' << r0.decomposer << ',' << r0.framework << ',' << records.size()
    << ',' << flagged << ',' << format_number(s.median) << ',' << format_number(s.mean) << ','
    << format_number(s.stddev);
  for (int k = 0; k < 3; ++k) o << ',' << format_number(rho_n[k] ? rho[k] / static_cast<double>(rho_n[k]) : nan);
  o << '\n';
  return o.str();
}

struct Comparison {
  std::string problem;
  std::size_t n_a = 0, n_b = 0;
  double median_a = 0, median_b = 0;
  double p_value = 1.0;
  bool significant = false;
  std::string better;  // "a", "b" or "none"
};

/// Pairs records by problem name and tests best_f of set a against set b,
/// correcting over all problems with Holm-Bonferroni.
inline std::vector<Comparison> compare_record_sets(const std::vector<RunRecord>& a,
                                                   const std::vector<RunRecord>& b, double alpha = 0.05) {
  std::map<std::string, std::pair<Vector, Vector>> by_problem;
  for (const auto& r : a)
    if (r.best_f) by_problem[r.problem].first.push_back(*r.best_f);
  for (const auto& r : b)
    if (r.best_f) by_problem[r.problem].second.push_back(*r.best_f);
  std::vector<Comparison> out;
  Vector p;
  for (const auto& [problem, samples] : by_problem) {
    if (samples.first.empty() || samples.second.empty()) continue;
    Comparison c;
    c.problem = problem;
    c.n_a = samples.first.size();
    c.n_b = samples.second.size();
    c.median_a = summarize(samples.first).median;
    c.median_b = summarize(samples.second).median;
    c.p_value = wilcoxon_rank_sum(samples.first, samples.second);
    p.push_back(c.p_value);
    out.push_back(c);
  }
  const auto reject = holm_bonferroni(p, alpha);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].significant = reject[i];
    out[i].better = !reject[i] ? "none" : (out[i].median_a < out[i].median_b ? "a" : "b");
  }
  return out;
}

/// Reads records from a JSON file (one record or an array) or from every
/// *.json file of a directory, in file-name order.
inline std::vector<RunRecord> load_records(const std::filesystem::path& p) {
  std::vector<RunRecord> out;
  auto take = [&](const json& j) {
    if (j.is_array())
      for (const auto& e : j) out.push_back(RunRecord::from_json(e));
    else if (j.contains("records"))
      for (const auto& e : j.at("records")) out.push_back(RunRecord::from_json(e));
    else
      out.push_back(RunRecord::from_json(j));
  };
  if (std::filesystem::is_directory(p)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(p))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) take(read_json_file(f));
  } else {
    take(read_json_file(p));
  }
  return out;
}

}  // namespace irrg::harness
