#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "xlayer/core_model.hpp"
#include "xlayer/tree_analysis.hpp"

namespace xlayer {

struct SteinerInstance {
  PhysicalNetwork graph;
  std::vector<int> terminals;   // sorted physical node indices, >= 2
  std::vector<double> costs;    // per edge, nonnegative finite
};

/// Terminals are the mapped images of the logical nodes; costs -ln(1-rho).
SteinerInstance steiner_instance_of(const CrossLayerInstance& inst);

/// Tree connecting all terminals; every leaf is a terminal.
struct SteinerTree {
  std::vector<int> edges;   // sorted physical edge indices
  std::vector<int> nodes;   // sorted spanned node indices
  double cost = 0.0;

  friend bool operator==(const SteinerTree&, const SteinerTree&) = default;
};

inline constexpr int kSteinerTerminalBound = 12;

/// Minimum-cost Steiner tree by dynamic programming over terminal subsets.
/// Throws when |terminals| exceeds the bound or terminals are disconnected.
SteinerTree steiner_exact(const SteinerInstance& si, int terminal_bound = kSteinerTerminalBound);

/// Metric-closure MST heuristic; cost at most twice the optimum.
SteinerTree steiner_2approx(const SteinerInstance& si);

struct MaxProtectingTreeResult {
  ProtectingTree tree;    // logical spanning tree routed along the Steiner tree
  SteinerTree steiner;
  double neg_log = 0.0;
  double prob = 0.0;      // exp(-steiner cost)
  bool exact = false;     // false => approximation, prob is a lower bound
};

/// Best single protecting tree: reduces to minimum Steiner tree over the
/// mapped logical nodes with costs -ln(1-rho). Falls back to the
/// 2-approximation (exact=false) past the terminal bound.
MaxProtectingTreeResult max_protecting_tree(const CrossLayerInstance& inst,
                                            int terminal_bound = kSteinerTerminalBound);

inline constexpr int kDisjointPairExhaustiveEdgeBound = 20;

/// Two edge-disjoint Steiner trees when the search finds them. Exhaustive
/// (absence proves nonexistence) only when |E_P| <= exhaustive_edge_bound;
/// larger graphs get a greedy attempt whose failure proves nothing.
std::optional<std::pair<SteinerTree, SteinerTree>> two_disjoint_steiner(
    const SteinerInstance& si, int exhaustive_edge_bound = kDisjointPairExhaustiveEdgeBound);

/// True when two edge-disjoint Steiner trees exist: every logical edge is
/// then routed once per tree (edge-disjoint duplicate), and the augmented
/// network is verified to stay connected under every single link failure.
bool augment_and_check(const CrossLayerInstance& inst);

/// Minimum over node pairs of `among` of unit-capacity max-flow.
int edge_connectivity(const PhysicalNetwork& g, const std::vector<int>& among);

}  // namespace xlayer
