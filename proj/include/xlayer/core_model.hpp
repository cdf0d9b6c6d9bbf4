#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xlayer {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on malformed or out-of-contract input files.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// One broken invariant, reported as data rather than thrown.
struct Violation {
  std::string code;
  std::string message;
};

/// Undirected edge between dense node indices, canonical form u <= v.
struct Edge {
  int u = -1;
  int v = -1;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(int a, int b) { return a <= b ? Edge{a, b} : Edge{b, a}; }

/// Simple undirected graph over string node ids. Node indices are assigned
/// by sorted id order so every derived ordering is reproducible across runs.
/// Construction is permissive (self-loops, parallel edges, disconnection are
/// representable); structural_violations() reports what is wrong.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  UndirectedGraph(std::vector<std::string> node_ids,
                  const std::vector<std::pair<std::string, std::string>>& edges);

  int node_count() const { return static_cast<int>(ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::vector<std::string>& node_ids() const { return ids_; }
  const std::string& node_id(int idx) const { return ids_.at(idx); }
  std::optional<int> find_node(const std::string& id) const;
  int index_of(const std::string& id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int eid) const { return edges_.at(eid); }
  std::optional<int> find_edge(int a, int b) const;

  /// Neighbors of v as (node index, edge index), sorted by node index.
  const std::vector<std::pair<int, int>>& neighbors(int v) const { return adj_.at(v); }

  bool connected() const;
  /// Connectivity over all nodes using only edges e with alive[e / index] true.
  bool connected_with(const std::vector<char>& edge_alive) const;

  bool has_self_loop() const;
  /// Indices of edges that duplicate an earlier edge.
  std::vector<int> parallel_edges() const;

  friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

 private:
  std::vector<std::string> ids_;                    // sorted, unique
  std::map<std::string, int> index_;
  std::vector<Edge> edges_;                         // canonical, sorted
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

class PhysicalNetwork {
 public:
  PhysicalNetwork() = default;
  PhysicalNetwork(UndirectedGraph graph, std::vector<double> failure_probs);

  const UndirectedGraph& graph() const { return graph_; }
  int node_count() const { return graph_.node_count(); }
  int edge_count() const { return graph_.edge_count(); }
  double rho(int eid) const { return rho_.at(eid); }
  const std::vector<double>& rhos() const { return rho_; }

  std::vector<Violation> structural_violations() const;

  friend bool operator==(const PhysicalNetwork&, const PhysicalNetwork&) = default;

 private:
  UndirectedGraph graph_;
  std::vector<double> rho_;   // indexed like graph_.edges()
};

class LogicalNetwork {
 public:
  LogicalNetwork() = default;
  explicit LogicalNetwork(UndirectedGraph graph) : graph_(std::move(graph)) {}

  const UndirectedGraph& graph() const { return graph_; }
  int node_count() const { return graph_.node_count(); }
  int edge_count() const { return graph_.edge_count(); }

  std::vector<Violation> structural_violations() const;

  friend bool operator==(const LogicalNetwork&, const LogicalNetwork&) = default;

 private:
  UndirectedGraph graph_;
};

/// Injective assignment of logical nodes onto physical nodes.
class NodeMapping {
 public:
  NodeMapping() = default;
  explicit NodeMapping(std::map<std::string, std::string> raw) : raw_(std::move(raw)) {}

  const std::map<std::string, std::string>& raw() const { return raw_; }

  friend bool operator==(const NodeMapping&, const NodeMapping&) = default;

 private:
  std::map<std::string, std::string> raw_;
};

class CrossLayerInstance {
 public:
  CrossLayerInstance() = default;
  CrossLayerInstance(PhysicalNetwork physical, LogicalNetwork logical, NodeMapping node_map);

  const PhysicalNetwork& physical() const { return physical_; }
  const LogicalNetwork& logical() const { return logical_; }
  const NodeMapping& node_map() const { return node_map_; }

  /// Physical node index that logical node `l` maps onto, -1 when unmapped
  /// or the target id is unknown.
  int mapped_node(int logical_node) const { return resolved_.at(logical_node); }

  /// Mapped images of all logical nodes (the Steiner terminal set), sorted.
  std::vector<int> terminal_nodes() const;

  /// Throws Error unless validate_instance() is empty.
  void require_valid() const;

  friend bool operator==(const CrossLayerInstance&, const CrossLayerInstance&) = default;

 private:
  PhysicalNetwork physical_;
  LogicalNetwork logical_;
  NodeMapping node_map_;
  std::vector<int> resolved_;   // logical node index -> physical node index
};

std::vector<Violation> validate_instance(const CrossLayerInstance& inst);

class FailureModel {
 public:
  enum class Kind { Unified, PerLink };

  static FailureModel unified(double rho);
  /// Per-link probabilities keyed by physical edge index of `phys`.
  static FailureModel per_link(std::vector<double> rhos);
  static FailureModel from_instance(const CrossLayerInstance& inst);

  Kind kind() const { return kind_; }
  double unified_rho() const;
  double rho_for(int edge_id) const;
  const std::vector<double>& per_link_rhos() const { return rhos_; }

  /// Short descriptor for reports, e.g. "unified:0.05" or "per-link".
  std::string descriptor() const;

 private:
  Kind kind_ = Kind::Unified;
  double rho_ = 0.0;
  std::vector<double> rhos_;
};

/// -ln(1 - rho). Strictly increasing on [0, 1), zero iff rho is zero.
double edge_weight(double rho);

/// Objective coefficient of a physical edge under the given failure model:
/// 1 for the unified model (link-counting objectives), -ln(1 - rho_e) otherwise.
double edge_weight(const PhysicalNetwork& phys, int edge_id, const FailureModel& model);

/// Copy of `inst` with every physical failure probability replaced per `model`.
CrossLayerInstance apply_model(const CrossLayerInstance& inst, const FailureModel& model);

/// Strict JSON instance format:
///   { "physical": {"nodes": [...], "edges": [{"u":..,"v":..,"rho":..}]},
///     "logical":  {"nodes": [...], "edges": [{"u":..,"v":..}]},
///     "node_map": {"logical-id": "physical-id"} }
/// Unknown keys are rejected; rho >= 1 is rejected at parse time.
CrossLayerInstance parse_instance(const std::string& json_text);
std::string serialize_instance(const CrossLayerInstance& inst);
CrossLayerInstance load_instance_file(const std::string& path);

}  // namespace xlayer
