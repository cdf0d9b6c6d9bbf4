#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "xlayer/harness.hpp"
#include "xlayer/milp.hpp"

using nlohmann::ordered_json;
using namespace xlayer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNonSurvivable = 10;
constexpr int kExitBadInput = 2;
constexpr int kExitInternal = 1;

std::string stem_of(const std::string& path) {
  size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = base.find_last_of('.');
  return (dot == std::string::npos || dot == 0) ? base : base.substr(0, dot);
}

void write_out(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Error("cannot write " + out_path);
  f << text;
}

std::optional<PoolPolicy> pool_from(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return PoolPolicy::parse(text);
}

int run_check(const std::string& file, const std::string& pool_text, bool exhaustive,
              bool cross_check) {
  CrossLayerInstance inst = load_instance_file(file);
  inst.require_valid();
  PoolPolicy pool = exhaustive ? PoolPolicy::all_simple()
                               : pool_from(pool_text).value_or(PoolPolicy::default_for(inst));
  SurvivableDecision d = is_survivable(inst, pool);

  ordered_json out;
  out["survivable"] = d.survivable;
  out["exhaustive"] = d.exhaustive;
  if (d.witness.has_value())
    out["witness"] = ordered_json::parse(serialize_mapping(inst, *d.witness));
  else
    out["witness"] = nullptr;

  if (cross_check) {
    MilpModel m = build_surtest_model(inst);
    SolveResult sr = solve_tiny(m);
    bool decided = sr.status != SolveResult::Status::LimitExceeded;
    bool feasible = sr.status == SolveResult::Status::Optimal;
    out["cross_check"] = {{"decided", decided}, {"feasible", feasible}};
    if (decided && feasible != d.survivable) {
      std::cerr << "internal error: surtest feasibility disagrees with the search\n";
      std::cout << out.dump(2) << "\n";
      return kExitInternal;
    }
  }
  std::cout << out.dump(2) << "\n";
  if (!d.exhaustive && !d.survivable)
    std::cerr << "note: candidate pools were truncated (" << pool.describe()
              << "); non-survivable verdict holds for the searched space\n";
  return d.survivable ? kExitOk : kExitNonSurvivable;
}

int run_analyze(const std::string& file, const std::string& pool_text, bool exhaustive,
                const std::string& out_path) {
  CrossLayerInstance inst = load_instance_file(file);
  AnalyzeOptions opt;
  opt.pool = pool_from(pool_text);
  opt.exhaustive = exhaustive;
  AnalysisResult a = analyze_instance(inst, opt);
  write_out(out_path, report_json(inst, a, stem_of(file)));
  if (!a.report.exhaustive)
    std::cerr << "note: candidate pools were truncated (" << a.report.pool_policy
              << "); phi is a certified lower bound\n";
  if (!a.cross_check_ok) {
    std::cerr << "internal error: analysis consistency checks failed\n";
    return kExitInternal;
  }
  return kExitOk;
}

int run_export(const std::string& file, const std::string& formulation,
               const std::string& format, bool unit_costs, const std::string& out_path) {
  CrossLayerInstance inst = load_instance_file(file);
  inst.require_valid();
  FailureModel fm =
      unit_costs ? FailureModel::unified(0.1) : FailureModel::from_instance(inst);
  MilpModel m;
  if (formulation == "max-tree") m = build_max_tree_model(inst, fm);
  else if (formulation == "base-set") m = build_base_set_model(inst, fm);
  else if (formulation == "surtest") m = build_surtest_model(inst);
  else throw Error("unknown formulation: " + formulation);
  write_out(out_path, write_model(m, model_format_of(format)));
  return kExitOk;
}

int run_gen(const std::string& file, std::optional<std::uint64_t> seed,
            const std::string& out_path) {
  GenSpec spec = load_genspec_file(file);
  if (seed.has_value()) spec.seed = *seed;
  CrossLayerInstance inst = gen_instance(spec, spec.seed);
  write_out(out_path, serialize_instance(inst));
  return kExitOk;
}

int run_sweep_cmd(const std::string& file, std::optional<std::uint64_t> seed, int parallel,
                  int instances, bool timings, const std::string& pool_text,
                  const std::string& format, const std::string& out_path) {
  GenSpec spec = load_genspec_file(file);
  if (seed.has_value()) spec.seed = *seed;
  SweepOptions opt;
  opt.parallel = parallel;
  opt.instances = instances;
  opt.timings = timings;
  opt.pool = pool_from(pool_text);
  std::vector<SweepRow> rows = run_sweep(spec, opt);
  if (format == "csv") {
    write_out(out_path, sweep_csv(rows));
  } else if (format == "json") {
    ordered_json arr = ordered_json::array();
    for (const SweepRow& r : rows) {
      ordered_json j;
      j["instance"] = r.instance_id;
      j["model"] = r.model;
      if (r.error.empty()) {
        j["max_tree_prob"] = r.max_tree_prob;
        j["base_set_prob"] = r.base_set_prob;
        j["ratio"] = r.ratio;
        j["survivable"] = r.survivable;
        if (r.k_min.has_value()) j["k_min"] = *r.k_min;
        else j["k_min"] = nullptr;
        j["wall_ms"] = r.wall_ms;
      } else {
        j["error"] = r.error;
      }
      arr.push_back(j);
    }
    write_out(out_path, arr.dump(2) + "\n");
  } else {
    throw Error("sweep format must be csv or json");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survivable probability of logical-over-physical networks"};
  app.require_subcommand(1);

  std::string file, pool_text, out_path;
  bool exhaustive = false, cross_check = false, unit_costs = false, timings = false;
  std::string formulation, format = "lp", sweep_format = "csv";
  std::uint64_t seed_val = 0;
  int parallel = 1, instances = 1;

  CLI::App* check = app.add_subcommand("check", "survivability decision (exit 0/10)");
  check->add_option("instance", file, "instance JSON file")->required();
  check->add_option("--pool", pool_text, "all | k-shortest:K | hops:H");
  check->add_flag("--exhaustive", exhaustive, "force all-simple candidate pools");
  check->add_flag("--cross-check", cross_check, "also solve the surtest feasibility model");

  CLI::App* analyze = app.add_subcommand("analyze", "full survivability report (JSON)");
  analyze->add_option("instance", file, "instance JSON file")->required();
  analyze->add_option("--pool", pool_text, "all | k-shortest:K | hops:H");
  analyze->add_flag("--exhaustive", exhaustive, "force all-simple candidate pools");
  analyze->add_option("-o,--out", out_path, "output file (default stdout)");

  CLI::App* exp = app.add_subcommand("export", "write a MIP formulation");
  exp->add_option("instance", file, "instance JSON file")->required();
  exp->add_option("--formulation", formulation, "max-tree | base-set | surtest")
      ->required()
      ->check(CLI::IsMember({"max-tree", "base-set", "surtest"}));
  exp->add_option("--format", format, "lp | mps")->check(CLI::IsMember({"lp", "mps"}));
  exp->add_flag("--unit-costs", unit_costs, "count links instead of weighting by -ln(1-rho)");
  exp->add_option("-o,--out", out_path, "output file (default stdout)");

  CLI::App* gen = app.add_subcommand("gen", "generate an instance from a genspec");
  gen->add_option("genspec", file, "genspec JSON file")->required();
  CLI::Option* gen_seed = gen->add_option("--seed", seed_val, "override the spec seed");
  gen->add_option("-o,--out", out_path, "output file (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "instances x failure models, one row each");
  sweep->add_option("genspec", file, "genspec JSON file")->required();
  CLI::Option* sweep_seed = sweep->add_option("--seed", seed_val, "override the spec seed");
  sweep->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--instances", instances, "instances per spec (seed, seed+1, ...)")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--timings", timings, "record real per-row wall time");
  sweep->add_option("--pool", pool_text, "all | k-shortest:K | hops:H");
  sweep->add_option("--format", sweep_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("-o,--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (app.got_subcommand(check))
      return run_check(file, pool_text, exhaustive, cross_check);
    if (app.got_subcommand(analyze))
      return run_analyze(file, pool_text, exhaustive, out_path);
    if (app.got_subcommand(exp))
      return run_export(file, formulation, format, unit_costs, out_path);
    if (app.got_subcommand(gen))
      return run_gen(file, gen_seed->count() ? std::optional<std::uint64_t>(seed_val)
                                             : std::nullopt,
                     out_path);
    if (app.got_subcommand(sweep))
      return run_sweep_cmd(file,
                           sweep_seed->count() ? std::optional<std::uint64_t>(seed_val)
                                               : std::nullopt,
                           parallel, instances, timings, pool_text, sweep_format, out_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitBadInput;
}
