// Python bindings: thin JSON-string wrappers over the C++ library so the
// module stays dependency-free on the Python side.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "xlayer/core_model.hpp"
#include "xlayer/harness.hpp"
#include "xlayer/instance_gen.hpp"
#include "xlayer/milp.hpp"
#include "xlayer/routing.hpp"
#include "xlayer/steiner.hpp"
#include "xlayer/surv_engine.hpp"

namespace py = pybind11;
using namespace xlayer;

namespace {

AnalyzeOptions options_from(const std::string& pool, bool exhaustive) {
  AnalyzeOptions opt;
  opt.exhaustive = exhaustive;
  if (!pool.empty()) opt.pool = PoolPolicy::parse(pool);
  return opt;
}

std::string analyze_json(const std::string& instance_json, const std::string& pool,
                         bool exhaustive, const std::string& instance_id) {
  CrossLayerInstance inst = parse_instance(instance_json);
  AnalysisResult r = analyze_instance(inst, options_from(pool, exhaustive));
  return report_json(inst, r, instance_id);
}

py::dict check_json(const std::string& instance_json, const std::string& pool) {
  CrossLayerInstance inst = parse_instance(instance_json);
  SurvivableDecision d = pool.empty() ? is_survivable(inst)
                                      : is_survivable(inst, PoolPolicy::parse(pool));
  py::dict out;
  out["survivable"] = d.survivable;
  out["exhaustive"] = d.exhaustive;
  if (d.witness)
    out["witness"] = serialize_mapping(inst, *d.witness);
  else
    out["witness"] = py::none();
  return out;
}

std::string export_model_text(const std::string& instance_json, const std::string& formulation,
                              const std::string& format, bool unit_costs) {
  CrossLayerInstance inst = parse_instance(instance_json);
  FailureModel fm = unit_costs ? FailureModel::unified(0.1) : FailureModel::from_instance(inst);
  MilpModel m;
  if (formulation == "max-tree")
    m = build_max_tree_model(inst, fm);
  else if (formulation == "base-set")
    m = build_base_set_model(inst, fm);
  else if (formulation == "surtest")
    m = build_surtest_model(inst);
  else
    throw Error("unknown formulation: " + formulation +
                " (expected max-tree, base-set or surtest)");
  return write_model(m, model_format_of(format));
}

std::string generate_json(const std::string& genspec_json, std::optional<std::uint64_t> seed) {
  GenSpec spec = parse_genspec(genspec_json);
  return serialize_instance(gen_instance(spec, seed.value_or(spec.seed)));
}

std::string sweep_csv_text(const std::string& genspec_json, int instances, int parallel,
                           const std::string& pool) {
  GenSpec spec = parse_genspec(genspec_json);
  SweepOptions opt;
  opt.instances = instances;
  opt.parallel = parallel;
  if (!pool.empty()) opt.pool = PoolPolicy::parse(pool);
  return sweep_csv(run_sweep(spec, opt));
}

double survivable_prob_of(const std::string& instance_json, const std::string& pool) {
  CrossLayerInstance inst = parse_instance(instance_json);
  SurvivabilityReport rep = pool.empty()
                                ? max_survivable_prob(inst)
                                : max_survivable_prob(inst, PoolPolicy::parse(pool));
  return rep.phi;
}

double max_tree_prob_of(const std::string& instance_json) {
  CrossLayerInstance inst = parse_instance(instance_json);
  return max_protecting_tree(inst).prob;
}

int k_min_of(const std::string& instance_json) {
  CrossLayerInstance inst = parse_instance(instance_json);
  return k_min(inst);
}

}  // namespace

PYBIND11_MODULE(_xlayersurv, mod) {
  mod.doc() = "Cross-layer network survivability analysis";

  mod.def("analyze", &analyze_json, py::arg("instance_json"), py::arg("pool") = "",
          py::arg("exhaustive") = false, py::arg("instance_id") = "",
          "Full analysis of an instance; returns the JSON report as a string.");
  mod.def("check", &check_json, py::arg("instance_json"), py::arg("pool") = "",
          "Survivability decision: dict with survivable/exhaustive/witness.");
  mod.def("export_model", &export_model_text, py::arg("instance_json"), py::arg("formulation"),
          py::arg("format") = "lp", py::arg("unit_costs") = false,
          "Write a MILP formulation (max-tree, base-set or surtest) as LP or MPS text.");
  mod.def("generate", &generate_json, py::arg("genspec_json"), py::arg("seed") = py::none(),
          "Generate a random instance from a generator spec; returns instance JSON.");
  mod.def("sweep", &sweep_csv_text, py::arg("genspec_json"), py::arg("instances") = 1,
          py::arg("parallel") = 1, py::arg("pool") = "",
          "Run a probability sweep and return the CSV text.");
  mod.def("survivable_prob", &survivable_prob_of, py::arg("instance_json"), py::arg("pool") = "",
          "Maximum survivable probability over the mapping pool.");
  mod.def("max_tree_prob", &max_tree_prob_of, py::arg("instance_json"),
          "Survivable probability of the best single protecting tree.");
  mod.def("k_min", &k_min_of, py::arg("instance_json"),
          "Minimum achievable number of critical links.");

  py::register_exception<Error>(mod, "XlayerError");
}
