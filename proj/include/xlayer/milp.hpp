#pragma once

#include <string>
#include <vector>

#include "xlayer/core_model.hpp"

namespace xlayer {

enum class VarKind { Binary, Continuous };

struct MilpVar {
  std::string name;
  VarKind kind = VarKind::Binary;
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const MilpVar&, const MilpVar&) = default;
};

enum class ConstraintSense { LE, GE, EQ };

struct LinTerm {
  int var = -1;
  double coef = 0.0;

  friend bool operator==(const LinTerm&, const LinTerm&) = default;
};

struct MilpConstraint {
  std::string name;
  std::vector<LinTerm> terms;   // ascending var index, no duplicates
  ConstraintSense sense = ConstraintSense::LE;
  double rhs = 0.0;

  friend bool operator==(const MilpConstraint&, const MilpConstraint&) = default;
};

enum class ObjectiveSense { Minimize, Maximize };

/// One mixed-integer model. Variable order is the declaration order and is
/// part of the model identity (serialization is byte-stable).
struct MilpModel {
  std::string name;         // formulation id: max_tree | base_set | surtest
  std::string root_node;    // logical root of the tree-flow rows ("" if none)
  ObjectiveSense sense = ObjectiveSense::Minimize;
  std::vector<MilpVar> vars;
  std::vector<double> objective;   // aligned with vars
  std::vector<MilpConstraint> constraints;

  int add_var(const std::string& name, VarKind kind, double lo, double hi, double obj_coef);
  int var_index(const std::string& name) const;   // -1 when absent

  /// Throws on structural defects (duplicate names, bad indices, empty rows).
  void validate() const;

  friend bool operator==(const MilpModel&, const MilpModel&) = default;
};

/// Objective min sum c_ij x_ij: cheapest physical edge set carrying a routed
/// logical spanning tree. Tree selection is encoded with one binary z per
/// logical edge plus a continuous flow on directed logical arcs (f vars)
/// capped by (|V_L|-1) z.
MilpModel build_max_tree_model(const CrossLayerInstance& inst, const FailureModel& model);

/// Objective min sum c_ij g_ij: shared-link indicators g, per-logical-edge
/// routing y, and per-physical-edge fractional tree flows w proving that
/// every unshared link's failure leaves the logical network connected.
MilpModel build_base_set_model(const CrossLayerInstance& inst, const FailureModel& model);

/// Feasibility probe: the base-set constraints with every g pinned to zero
/// (objective min sum y). Feasible iff a fully survivable routing exists.
MilpModel build_surtest_model(const CrossLayerInstance& inst);

enum class ModelFormat { Lp, Mps };

ModelFormat model_format_of(const std::string& text);   // "lp" | "mps"

/// Deterministic text form; write_model then parse_model is the identity.
std::string write_model(const MilpModel& m, ModelFormat format);
MilpModel parse_model(const std::string& text, ModelFormat format);

struct SolveLimits {
  long long max_nodes = 50'000'000;
  int max_binaries = 192;
};

struct SolveResult {
  enum class Status { Optimal, Infeasible, LimitExceeded };
  Status status = Status::Infeasible;
  double objective = 0.0;            // incumbent value when one exists
  bool has_incumbent = false;
  std::vector<double> assignment;    // aligned with vars, valid with incumbent
  long long nodes = 0;
};

/// Implicit enumeration over the binary variables with constraint
/// propagation; continuous variables are handled by max-flow feasibility on
/// their (network-structured) equality rows. Exact within the limits.
SolveResult solve_tiny(const MilpModel& m, const SolveLimits& limits = {});

}  // namespace xlayer
