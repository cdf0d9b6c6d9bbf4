#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xlayer/core_model.hpp"
#include "xlayer/routing.hpp"
#include "xlayer/tree_analysis.hpp"

namespace xlayer {

/// Physical edges whose individual failure disconnects the logical network
/// under `mapping`.
struct CriticalLinkSet {
  std::vector<int> edges;   // sorted physical edge indices
  LinkMapping mapping;
};

struct SurvivabilityReport {
  double phi = 0.0;             // max over searched mappings of the survivable probability
  double neg_log_phi = 0.0;
  LinkMapping best_mapping;
  CriticalLinkSet critical;
  ProtectingTreeSet base_set;
  std::optional<int> k_min;     // |critical| when all links share one failure probability
  bool exhaustive = false;      // candidate pools covered all simple paths
  std::string pool_policy;
  long long mappings_considered = 0;
  long long search_nodes = 0;
};

CriticalLinkSet critical_links(const CrossLayerInstance& inst, const LinkMapping& m);

double mapping_neg_log_weight(const CrossLayerInstance& inst, const LinkMapping& m);
double mapping_survivable_prob(const CrossLayerInstance& inst, const LinkMapping& m);

/// Every spanning tree of the logical network, routed under m.
ProtectingTreeSet full_protecting_set(const CrossLayerInstance& inst, const LinkMapping& m,
                                      long long tree_limit = 200000);

/// Shared edges of the full protecting set must equal the critical set.
bool critical_intersection_check(const CrossLayerInstance& inst, const LinkMapping& m);

/// Exact maximum of mapping_survivable_prob over the Cartesian product of
/// candidate pools (branch-and-bound; partial mappings are bounded by the
/// product over edges already forced critical). Deterministic: ties go to the
/// lexicographically smallest canonical mapping serialization.
SurvivabilityReport max_survivable_prob(const CrossLayerInstance& inst, const PoolPolicy& policy);
SurvivabilityReport max_survivable_prob(const CrossLayerInstance& inst);

/// Greedy certifying subset of the full protecting set: every non-critical
/// physical edge is protected by at least one member; at most |E_P| trees;
/// shared edges equal the critical set of m_star exactly.
ProtectingTreeSet base_set_extract(const CrossLayerInstance& inst, const LinkMapping& m_star);

struct SurvivableDecision {
  bool survivable = false;
  std::optional<LinkMapping> witness;   // empty-critical-set mapping when survivable
  bool exhaustive = false;
};

/// True iff some mapping in the pool product has an empty critical set.
SurvivableDecision is_survivable(const CrossLayerInstance& inst, const PoolPolicy& policy);
SurvivableDecision is_survivable(const CrossLayerInstance& inst);

/// Minimum achievable critical-set cardinality (search under a unified
/// failure probability; the argmax does not depend on its value).
int k_min(const CrossLayerInstance& inst, const PoolPolicy& policy);
int k_min(const CrossLayerInstance& inst);

}  // namespace xlayer
