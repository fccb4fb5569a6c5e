// Command-line front end: decompose, optimize, bench, routing-gen, stats.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "irrg/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw irrg::ConfigError("cannot write '" + out_path + "'");
  out << text;
}

json problem_ref(const std::string& s) {
  // Inline JSON objects are accepted as well as ids and paths.
  if (!s.empty() && s.front() == '{') return json::parse(s);
  return json(s);
}

struct DecomposeOptions {
  std::string problem, decomposer = "irrg", out, matrix_out;
  std::uint64_t seed = 1;
  std::size_t n_s = 10, eps_sti = 15, eps_s = 100, eps_n = 50, N = 10;
  std::uint64_t global_ffe = 5000, local_ffe = 15000;

  json decomposer_json() const {
    return {{"name", decomposer},
            {"n_s", n_s},
            {"eps_sti", eps_sti},
            {"eps_s", eps_s},
            {"eps_n", eps_n},
            {"N", N},
            {"bootstrap_global_ffe", global_ffe},
            {"bootstrap_local_ffe", local_ffe}};
  }
};

void add_decomposer_flags(CLI::App* cmd, DecomposeOptions& o) {
  cmd->add_option("--decomposer", o.decomposer, "irrg, rdg3, fvil, whole or none")->capture_default_str();
  cmd->add_option("--n-s", o.n_s, "samples per ranking")->capture_default_str();
  cmd->add_option("--eps-sti", o.eps_sti, "stale iterations before stopping")->capture_default_str();
  cmd->add_option("--eps-s", o.eps_s, "size of packed separable groups")->capture_default_str();
  cmd->add_option("--eps-n", o.eps_n, "rdg3 non-separable group size")->capture_default_str();
  cmd->add_option("--N", o.N, "fvil trials per check")->capture_default_str();
  cmd->add_option("--global-ffe", o.global_ffe, "bootstrap global search budget")->capture_default_str();
  cmd->add_option("--local-ffe", o.local_ffe, "bootstrap local search budget")->capture_default_str();
}

int run_decompose(const DecomposeOptions& o) {
  const auto f = irrg::harness::resolve_problem(problem_ref(o.problem));
  const auto dc = irrg::harness::parse_decomposer(o.decomposer_json());
  const auto d = irrg::harness::decompose(f, dc, o.seed);
  emit(d.to_json().dump(2) + "\n", o.out);
  if (!o.matrix_out.empty()) emit(irrg::decomposition_matrix(f.dimension(), d).to_text(), o.matrix_out);
  return 0;
}

struct OptimizeOptions {
  DecomposeOptions dec;
  std::string config, framework = "cbcc", trace_out;
  std::uint64_t budget = 100000, trace_interval = 0;
  bool timing = false;
};

int run_optimize(const OptimizeOptions& o) {
  json doc;
  if (!o.config.empty()) {
    doc = irrg::harness::read_json_file(o.config);
  } else {
    doc = {{"name", "optimize"},
           {"kind", "optimization"},
           {"problem", problem_ref(o.dec.problem)},
           {"decomposer", o.dec.decomposer_json()},
           {"framework", o.framework},
           {"budget", o.budget},
           {"seed", o.dec.seed},
           {"trace_interval", o.trace_interval}};
  }
  auto config = irrg::harness::parse_experiment(doc);
  config.kind = "optimization";
  const auto record = irrg::harness::run_once(config, config.seed);
  json j = record.to_json();
  if (o.timing) j["wall_time_s"] = record.wall_time_s;
  emit(j.dump(2) + "\n", o.dec.out);
  if (!o.trace_out.empty()) {
    std::ostringstream s;
    if (!record.cc_trace.empty())
      irrg::write_cc_trace_csv(s, record.cc_trace);
    else
      irrg::harness::write_trace_csv(s, record.trace);
    emit(s.str(), o.trace_out);
  }
  return 0;
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out.empty() ? "experiment" : out;
}

int run_bench(const std::string& config_path, const std::string& out_dir, std::size_t threads) {
  const auto experiments = irrg::harness::parse_experiments(irrg::harness::read_json_file(config_path));
  fs::create_directories(out_dir);
  std::string summary = irrg::harness::summary_csv_header();
  std::ostringstream timings;
  timings << "experiment,seed,wall_time_s\n";
  for (const auto& e : experiments) {
    const auto records = irrg::harness::run_experiment(e, threads);
    const fs::path rec_dir = fs::path(out_dir) / "records" / safe_name(e.name);
    const fs::path trace_dir = fs::path(out_dir) / "traces" / safe_name(e.name);
    fs::create_directories(rec_dir);
    for (const auto& r : records) {
      const std::string stem = "seed_" + std::to_string(r.seed);
      emit(r.to_json().dump(2) + "\n", (rec_dir / (stem + ".json")).string());
      if (!r.cc_trace.empty() || !r.trace.empty()) {
        std::ostringstream s;
        if (!r.cc_trace.empty())
          irrg::write_cc_trace_csv(s, r.cc_trace);
        else
          irrg::harness::write_trace_csv(s, r.trace);
        emit(s.str(), (trace_dir / (stem + ".csv")).string());
      }
      timings << e.name << ',' << r.seed << ',' << r.wall_time_s << '\n';
    }
    summary += irrg::harness::summary_csv_row(records);
  }
  emit(summary, (fs::path(out_dir) / "summary.csv").string());
  emit(timings.str(), (fs::path(out_dir) / "timings.csv").string());
  std::cout << summary;
  return 0;
}

struct RoutingOptions {
  irrg::routing::GeneratorConfig gen;
  std::optional<double> example_c3;
  std::string out;
};

int run_routing_gen(const RoutingOptions& o) {
  const auto inst = o.example_c3 ? irrg::routing::four_node_example(*o.example_c3)
                                 : irrg::routing::generate_instance(o.gen);
  emit(irrg::routing::to_json(inst).dump(2) + "\n", o.out);
  return 0;
}

int run_stats(const std::string& a, const std::string& b, double alpha, const std::string& out) {
  const auto ra = irrg::harness::load_records(a);
  const auto rb = irrg::harness::load_records(b);
  const auto cmp = irrg::harness::compare_record_sets(ra, rb, alpha);
  json rows = json::array();
  for (const auto& c : cmp)
    rows.push_back({{"problem", c.problem},
                    {"n_a", c.n_a},
                    {"n_b", c.n_b},
                    {"median_a", c.median_a},
                    {"median_b", c.median_b},
                    {"p_value", c.p_value},
                    {"significant", c.significant},
                    {"better", c.better}});
  const json report{{"alpha", alpha}, {"test", "wilcoxon rank-sum, Holm-Bonferroni"}, {"comparisons", rows}};
  emit(report.dump(2) + "\n", out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-interaction decomposition and cooperative co-evolution toolkit"};
  app.require_subcommand(1);

  DecomposeOptions dec;
  auto* c_dec = app.add_subcommand("decompose", "Decompose a problem and print the decomposition JSON");
  c_dec->add_option("--problem", dec.problem, "fixture id, JSON file or inline JSON")->required();
  c_dec->add_option("--seed", dec.seed, "random seed")->capture_default_str();
  c_dec->add_option("--out", dec.out, "output file (default: stdout)");
  c_dec->add_option("--matrix", dec.matrix_out, "also write the interaction matrix (triangular text)");
  add_decomposer_flags(c_dec, dec);

  OptimizeOptions opt;
  auto* c_opt = app.add_subcommand("optimize", "Decompose, then optimize; print the run record JSON");
  c_opt->add_option("--config", opt.config, "experiment JSON (overrides the flags below)");
  c_opt->add_option("--problem", opt.dec.problem, "fixture id, JSON file or inline JSON");
  c_opt->add_option("--framework", opt.framework, "cbcc, ccfr2 or es")->capture_default_str();
  c_opt->add_option("--budget", opt.budget, "total FFE budget")->capture_default_str();
  c_opt->add_option("--seed", opt.dec.seed, "random seed")->capture_default_str();
  c_opt->add_option("--trace-interval", opt.trace_interval, "FFEs between trace checkpoints");
  c_opt->add_option("--out", opt.dec.out, "output file (default: stdout)");
  c_opt->add_option("--trace", opt.trace_out, "write the convergence trace CSV here");
  c_opt->add_flag("--timing", opt.timing, "include wall time in the record");
  add_decomposer_flags(c_opt, opt.dec);

  std::string bench_config, bench_out = "bench-out";
  std::size_t threads = 1;
  auto* c_bench = app.add_subcommand("bench", "Run experiments from a config file");
  c_bench->add_option("--config", bench_config, "experiment JSON")->required();
  c_bench->add_option("--out", bench_out, "output directory")->capture_default_str();
  c_bench->add_option("--threads", threads, "concurrent repetitions")->capture_default_str();

  RoutingOptions rt;
  double c3 = 0.0;
  auto* c_rt = app.add_subcommand("routing-gen", "Generate a multi-path routing instance");
  c_rt->add_option("--nodes", rt.gen.nodes)->capture_default_str();
  c_rt->add_option("--links", rt.gen.links)->capture_default_str();
  c_rt->add_option("--demands", rt.gen.demand_count)->capture_default_str();
  c_rt->add_option("--paths", rt.gen.paths_per_demand, "candidate paths per demand")->capture_default_str();
  c_rt->add_option("--capacity-min", rt.gen.capacity_lo)->capture_default_str();
  c_rt->add_option("--capacity-max", rt.gen.capacity_hi)->capture_default_str();
  c_rt->add_option("--volume-min", rt.gen.volume_lo)->capture_default_str();
  c_rt->add_option("--volume-max", rt.gen.volume_hi)->capture_default_str();
  c_rt->add_option("--seed", rt.gen.seed)->capture_default_str();
  auto* ex = c_rt->add_option("--example", c3, "emit the 4-node example with this shared-link capacity");
  c_rt->add_option("--out", rt.out, "output file (default: stdout)");

  std::string sa, sb, s_out;
  double alpha = 0.05;
  auto* c_st = app.add_subcommand("stats", "Compare two record sets (Wilcoxon rank-sum + Holm)");
  c_st->add_option("--a", sa, "record file or directory")->required();
  c_st->add_option("--b", sb, "record file or directory")->required();
  c_st->add_option("--alpha", alpha)->capture_default_str();
  c_st->add_option("--out", s_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*c_dec) return run_decompose(dec);
    if (*c_opt) {
      if (opt.config.empty() && opt.dec.problem.empty()) throw irrg::ConfigError("optimize needs --config or --problem");
      return run_optimize(opt);
    }
    if (*c_bench) return run_bench(bench_config, bench_out, threads);
    if (*c_rt) {
      if (*ex) rt.example_c3 = c3;
      return run_routing_gen(rt);
    }
    if (*c_st) return run_stats(sa, sb, alpha, s_out);
  } catch (const irrg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
