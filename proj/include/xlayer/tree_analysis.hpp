#pragma once

#include <vector>

#include "xlayer/core_model.hpp"
#include "xlayer/routing.hpp"

namespace xlayer {

/// Logical spanning tree plus the physical routing of its branches.
/// `routing` is indexed by logical edge id; only the tau edges need routes.
struct ProtectingTree {
  std::vector<int> tau;   // logical edge indices, sorted
  LinkMapping routing;

  friend bool operator==(const ProtectingTree&, const ProtectingTree&) = default;
};

struct ProtectingTreeSet {
  std::vector<ProtectingTree> trees;

  friend bool operator==(const ProtectingTreeSet&, const ProtectingTreeSet&) = default;
};

/// Union of the routed branch edge sets of lambda, sorted physical edge ids.
std::vector<int> used_edges(const ProtectingTree& lambda);

/// Number of spanning trees by the matrix-tree theorem (integer Bareiss
/// elimination). Throws on 64-bit overflow.
long long spanning_tree_count(const UndirectedGraph& g);

/// All spanning trees as sorted edge-id lists, deterministic order
/// (contraction/deletion recursion, include-smallest-edge branch first).
/// Throws if spanning_tree_count exceeds `limit`.
std::vector<std::vector<int>> enumerate_spanning_trees(const LogicalNetwork& gl,
                                                       long long limit = 200000);

/// True iff no routed branch of lambda uses physical edge e.
bool protects(const ProtectingTree& lambda, int e);

/// Sum of edge weights over used_edges(lambda) — the -ln of its probability.
double tree_neg_log_weight(const PhysicalNetwork& phys, const ProtectingTree& lambda);

/// Product of (1 - rho_e) over used_edges(lambda), computed in log-space.
double tree_survivable_prob(const PhysicalNetwork& phys, const ProtectingTree& lambda);

/// Physical edges used by every tree of the set (the shared-link set).
std::vector<int> shared_edges(const ProtectingTreeSet& set);

/// Product of (1 - rho_e) over shared_edges; 1.0 for an empty intersection.
double tree_set_survivable_prob(const PhysicalNetwork& phys, const ProtectingTreeSet& set);
double tree_set_neg_log_weight(const PhysicalNetwork& phys, const ProtectingTreeSet& set);

/// Routes every edge of the logical spanning tree `tau` per mapping `m`.
ProtectingTree route_tree(const std::vector<int>& tau, const LinkMapping& m);

}  // namespace xlayer
