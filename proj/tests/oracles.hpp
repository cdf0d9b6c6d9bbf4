// Independent reference implementations used to validate the library.
// Everything here is written against the data model only (graphs, paths,
// mappings) with straightforward brute-force algorithms, so agreement with
// the optimized library code is meaningful.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xlayer/core_model.hpp"
#include "xlayer/milp.hpp"
#include "xlayer/routing.hpp"
#include "xlayer/tree_analysis.hpp"

namespace oracle {

using xlayer::CrossLayerInstance;
using xlayer::LinkMapping;
using xlayer::PhysicalNetwork;
using xlayer::UndirectedGraph;

// All simple paths between two nodes, recursive DFS, each path as a node
// index sequence. Sorted lexicographically.
std::vector<std::vector<int>> all_simple_paths(const UndirectedGraph& g, int s, int t);

// Connectivity over all nodes when the listed edges are removed.
bool connected_without(const UndirectedGraph& g, const std::vector<int>& dead_edges);

// Physical edges whose individual failure disconnects the logical layer
// under the given total mapping. Sorted edge indices.
std::vector<int> critical_links(const CrossLayerInstance& inst, const LinkMapping& m);

// Exhaustive maximal survivable probability: every combination of simple
// paths for every logical edge, flat odometer enumeration. Also reports the
// minimal critical-set cardinality over all mappings.
struct PhiResult {
  double phi = 0.0;
  int k_min = 0;
  long long mappings = 0;
  LinkMapping best;
};
PhiResult phi_exhaustive(const CrossLayerInstance& inst);

// Product of |simple paths| over the logical edges; guards enumeration cost.
double mapping_space_size(const CrossLayerInstance& inst);

// Minimum Steiner tree by brute force over Steiner-node subsets: for every
// subset S of non-terminals, MST of the subgraph induced on terminals + S.
struct SteinerOracle {
  double cost = 0.0;
  std::vector<int> edges;   // sorted edge ids of one optimal tree
};
std::optional<SteinerOracle> steiner_brute(const UndirectedGraph& g,
                                           const std::vector<double>& cost,
                                           const std::vector<int>& terminals);

// Spanning tree count via Kirchhoff's theorem in floating point.
long long spanning_tree_count(const UndirectedGraph& g);

// All spanning trees of a graph as sorted edge-id sets (subset filter).
std::vector<std::vector<int>> all_spanning_trees(const UndirectedGraph& g);

// Edges whose removal disconnects the graph.
std::vector<int> bridges(const UndirectedGraph& g);

// Max flow between s and t on a unit-capacity copy of g (edge connectivity
// when minimized over pairs); plain BFS augmentation.
int edge_connectivity(const UndirectedGraph& g, const std::vector<int>& among);

// Best single protecting tree by exhaustive search over logical spanning
// trees and all per-branch route combinations.
struct BestTreeOracle {
  double prob = 0.0;
  double space = 0.0;   // number of (tree, routing) combinations
};
BestTreeOracle best_protecting_tree(const CrossLayerInstance& inst);

// Intersection over every routed spanning tree of its used physical edges,
// routed under the fixed mapping m. Sorted edge ids.
std::vector<int> all_tree_shared_edges(const CrossLayerInstance& inst, const LinkMapping& m);

// Deterministic random instances for property tests. Instances are always
// valid (both layers connected, injective map) and sized so that exhaustive
// oracles stay cheap: the constructor rerolls until mapping_space_size stays
// below `space_bound`.
struct InstanceGen {
  std::uint64_t seed;
  int max_phys_nodes = 8;
  int max_logical_nodes = 4;
  double space_bound = 200000.0;
  int max_extra_edges = -1;  // attempted edges beyond the spanning tree; -1 scales with size

  CrossLayerInstance make(std::uint64_t index) const;
};

// Exhaustive 0/1 reference for MILP models whose variables are all binary:
// tries every assignment, checks every row, returns the best objective.
struct MilpBrute {
  bool feasible = false;
  double objective = 0.0;
};
MilpBrute milp_brute(const xlayer::MilpModel& m);

}  // namespace oracle
