#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xlayer/core_model.hpp"
#include "xlayer/instance_gen.hpp"
#include "xlayer/routing.hpp"
#include "xlayer/steiner.hpp"
#include "xlayer/surv_engine.hpp"

namespace xlayer {

struct AnalyzeOptions {
  std::optional<PoolPolicy> pool;   // default: PoolPolicy::default_for(instance)
  bool exhaustive = false;          // force all-simple pools
};

struct AnalysisResult {
  SurvivabilityReport report;
  MaxProtectingTreeResult max_tree;
  bool survivable = false;
  // Consistency of the Steiner reduction against the searched optimum.
  // `ran` is false under truncated pools or past the exact terminal bound.
  bool cross_check_ran = false;
  bool cross_check_ok = true;
  double base_set_prob = 0.0;        // tree_set_survivable_prob of the base set
  double best_set_tree_prob = 0.0;   // best single tree within the base set
};

/// Full single-instance pipeline: mapping search, base-set extraction,
/// maximal protecting tree, consistency checks. If a truncated pool leaves
/// the searched maximum below the Steiner tree bound, the Steiner tree is
/// lifted into a whole-instance mapping so phi never understates it.
AnalysisResult analyze_instance(const CrossLayerInstance& inst, const AnalyzeOptions& opt = {});

/// Deterministic JSON rendering of an analysis.
std::string report_json(const CrossLayerInstance& inst, const AnalysisResult& r,
                        const std::string& instance_id);

struct SweepRow {
  std::string instance_id;
  std::string model;            // failure-model descriptor (unified rho or normal mean)
  double max_tree_prob = 0.0;
  double base_set_prob = 0.0;   // = phi
  double ratio = 0.0;           // max_tree_prob / base_set_prob
  bool survivable = false;
  std::optional<int> k_min;     // unified models only
  double wall_ms = 0.0;         // 0 unless timings were requested
  std::string error;            // row failed when non-empty
};

struct SweepOptions {
  int parallel = 1;
  int instances = 1;     // instances generated per spec: seeds seed, seed+1, ...
  bool timings = false;  // real per-row wall time (breaks byte-determinism)
  std::optional<PoolPolicy> pool;
};

/// One row per (generated instance, failure model), in deterministic
/// (instance, model) order regardless of --parallel. Row-level failures are
/// recorded in the row, not thrown.
std::vector<SweepRow> run_sweep(const GenSpec& spec, const SweepOptions& opt = {});

/// Fixed-column CSV (column order is versioned in the header comment).
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// True when XLAYER_SURV_LOG is set to a non-empty value.
bool log_enabled();
void log_line(const std::string& msg);

}  // namespace xlayer
