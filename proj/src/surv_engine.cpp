#include "xlayer/surv_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xlayer {

namespace {

constexpr double kTieEps = 1e-12;

// Connectivity of the logical network when the logical edges flagged in
// `dropped` are removed.
bool logical_connected_without(const CrossLayerInstance& inst, const std::vector<char>& dropped) {
  std::vector<char> alive(inst.logical().edge_count());
  for (int mu = 0; mu < inst.logical().edge_count(); ++mu) alive[mu] = !dropped[mu];
  return inst.logical().graph().connected_with(alive);
}

// Shared search state. Routes are assigned edge by edge; `users[e]` lists the
// logical edges currently routed across physical edge e.
struct SearchState {
  const CrossLayerInstance* inst;
  std::vector<std::vector<PhysicalPath>> pools;   // per logical edge
  std::vector<int> order;                          // logical edges, ascending pool size
  std::vector<const PhysicalPath*> route;          // assigned routes (null = unassigned)
  std::vector<std::vector<int>> users;             // physical edge -> logical edges on it
  std::vector<double> weight;                      // physical edge -> -ln(1-rho)
  long long nodes = 0;
  long long leaves = 0;

  explicit SearchState(const CrossLayerInstance& instance, const PoolPolicy& policy)
      : inst(&instance) {
    int el = instance.logical().edge_count();
    pools.resize(el);
    for (int mu = 0; mu < el; ++mu) pools[mu] = candidate_paths(instance, mu, policy);
    order.resize(el);
    for (int mu = 0; mu < el; ++mu) order[mu] = mu;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pools[a].size() < pools[b].size();
    });
    route.assign(el, nullptr);
    users.assign(instance.physical().edge_count(), {});
    weight.resize(instance.physical().edge_count());
    for (int e = 0; e < instance.physical().edge_count(); ++e)
      weight[e] = edge_weight(instance.physical().rho(e));
  }

  void assign(int mu, const PhysicalPath& p) {
    route[mu] = &p;
    for (int e : p.edges) users[e].push_back(mu);
  }

  void unassign(int mu) {
    for (int e : route[mu]->edges) users[e].pop_back();
    route[mu] = nullptr;
  }

  // Physical edges that disconnect the logical net no matter how the
  // remaining logical edges get routed: dropping just the assigned users of
  // e already disconnects. Returns the summed weight; fills `out` if given.
  double forced_critical_weight(std::vector<int>* out) const {
    double sum = 0.0;
    std::vector<char> dropped(inst->logical().edge_count(), 0);
    for (int e = 0; e < inst->physical().edge_count(); ++e) {
      if (users[e].empty()) continue;
      for (int mu : users[e]) dropped[mu] = 1;
      if (!logical_connected_without(*inst, dropped)) {
        sum += weight[e];
        if (out) out->push_back(e);
      }
      for (int mu : users[e]) dropped[mu] = 0;
    }
    return sum;
  }

  bool any_forced_critical() const {
    std::vector<char> dropped(inst->logical().edge_count(), 0);
    for (int e = 0; e < inst->physical().edge_count(); ++e) {
      if (users[e].empty()) continue;
      for (int mu : users[e]) dropped[mu] = 1;
      bool ok = logical_connected_without(*inst, dropped);
      for (int mu : users[e]) dropped[mu] = 0;
      if (!ok) return true;
    }
    return false;
  }

  LinkMapping snapshot() const {
    std::vector<PhysicalPath> routes(route.size());
    for (size_t mu = 0; mu < route.size(); ++mu)
      if (route[mu]) routes[mu] = *route[mu];
    return LinkMapping(std::move(routes));
  }
};

struct Best {
  bool have = false;
  double neg_log = std::numeric_limits<double>::infinity();
  LinkMapping mapping;
  std::string key;
};

void search_max(SearchState& st, int depth, Best& best) {
  ++st.nodes;
  double bound = st.forced_critical_weight(nullptr);
  if (best.have && bound > best.neg_log + kTieEps) return;
  if (depth == static_cast<int>(st.order.size())) {
    ++st.leaves;
    LinkMapping m = st.snapshot();
    std::string key = m.canonical_key(*st.inst);
    if (!best.have || bound < best.neg_log - kTieEps ||
        (std::abs(bound - best.neg_log) <= kTieEps && key < best.key)) {
      best.have = true;
      best.neg_log = std::min(bound, best.neg_log);
      best.mapping = std::move(m);
      best.key = std::move(key);
    }
    return;
  }
  int mu = st.order[depth];
  for (const PhysicalPath& p : st.pools[mu]) {
    st.assign(mu, p);
    search_max(st, depth + 1, best);
    st.unassign(mu);
  }
}

bool search_witness(SearchState& st, int depth, LinkMapping& witness) {
  ++st.nodes;
  if (st.any_forced_critical()) return false;
  if (depth == static_cast<int>(st.order.size())) {
    ++st.leaves;
    witness = st.snapshot();
    return true;
  }
  int mu = st.order[depth];
  for (const PhysicalPath& p : st.pools[mu]) {
    st.assign(mu, p);
    if (search_witness(st, depth + 1, witness)) return true;
    st.unassign(mu);
  }
  return false;
}

bool uniform_rhos(const PhysicalNetwork& phys) {
  for (int e = 1; e < phys.edge_count(); ++e)
    if (phys.rho(e) != phys.rho(0)) return false;
  return phys.edge_count() > 0;
}

}  // namespace

CriticalLinkSet critical_links(const CrossLayerInstance& inst, const LinkMapping& m) {
  if (!m.total()) throw Error("critical_links needs a total mapping");
  CriticalLinkSet out;
  out.mapping = m;
  std::vector<char> dropped(inst.logical().edge_count(), 0);
  for (int e = 0; e < inst.physical().edge_count(); ++e) {
    for (int mu = 0; mu < m.size(); ++mu) {
      const auto& edges = m.route(mu).edges;
      if (std::find(edges.begin(), edges.end(), e) != edges.end()) dropped[mu] = 1;
    }
    if (!logical_connected_without(inst, dropped)) out.edges.push_back(e);
    std::fill(dropped.begin(), dropped.end(), 0);
  }
  return out;
}

double mapping_neg_log_weight(const CrossLayerInstance& inst, const LinkMapping& m) {
  double w = 0.0;
  for (int e : critical_links(inst, m).edges) w += edge_weight(inst.physical().rho(e));
  return w;
}

double mapping_survivable_prob(const CrossLayerInstance& inst, const LinkMapping& m) {
  return std::exp(-mapping_neg_log_weight(inst, m));
}

ProtectingTreeSet full_protecting_set(const CrossLayerInstance& inst, const LinkMapping& m,
                                      long long tree_limit) {
  if (!m.total()) throw Error("full_protecting_set needs a total mapping");
  ProtectingTreeSet set;
  for (const auto& tau : enumerate_spanning_trees(inst.logical(), tree_limit))
    set.trees.push_back(route_tree(tau, m));
  return set;
}

bool critical_intersection_check(const CrossLayerInstance& inst, const LinkMapping& m) {
  ProtectingTreeSet full = full_protecting_set(inst, m);
  return shared_edges(full) == critical_links(inst, m).edges;
}

SurvivabilityReport max_survivable_prob(const CrossLayerInstance& inst,
                                        const PoolPolicy& policy) {
  inst.require_valid();
  SearchState st(inst, policy);
  Best best;
  search_max(st, 0, best);
  if (!best.have) throw Error("mapping search found no candidate");   // pools are nonempty

  SurvivabilityReport rep;
  rep.best_mapping = best.mapping;
  rep.critical = critical_links(inst, best.mapping);
  rep.neg_log_phi = 0.0;
  for (int e : rep.critical.edges) rep.neg_log_phi += edge_weight(inst.physical().rho(e));
  rep.phi = std::exp(-rep.neg_log_phi);
  rep.base_set = base_set_extract(inst, best.mapping);
  if (uniform_rhos(inst.physical()) || rep.critical.edges.empty())
    rep.k_min = static_cast<int>(rep.critical.edges.size());
  rep.exhaustive = policy.exhaustive();
  rep.pool_policy = policy.describe();
  rep.mappings_considered = st.leaves;
  rep.search_nodes = st.nodes;
  return rep;
}

SurvivabilityReport max_survivable_prob(const CrossLayerInstance& inst) {
  return max_survivable_prob(inst, PoolPolicy::default_for(inst));
}

ProtectingTreeSet base_set_extract(const CrossLayerInstance& inst, const LinkMapping& m_star) {
  ProtectingTreeSet full = full_protecting_set(inst, m_star);
  std::vector<int> critical = critical_links(inst, m_star).edges;

  // Sort candidates by canonical tree form so greedy ties are reproducible.
  std::sort(full.trees.begin(), full.trees.end(),
            [](const ProtectingTree& a, const ProtectingTree& b) { return a.tau < b.tau; });

  std::vector<char> is_critical(inst.physical().edge_count(), 0);
  for (int e : critical) is_critical[e] = 1;
  std::vector<char> covered(inst.physical().edge_count(), 0);
  int uncovered = 0;
  for (int e = 0; e < inst.physical().edge_count(); ++e)
    if (!is_critical[e]) ++uncovered;

  std::vector<std::vector<char>> protects_edge(full.trees.size());
  for (size_t t = 0; t < full.trees.size(); ++t) {
    protects_edge[t].assign(inst.physical().edge_count(), 1);
    for (int e : used_edges(full.trees[t])) protects_edge[t][e] = 0;
  }

  ProtectingTreeSet base;
  std::vector<char> taken(full.trees.size(), 0);
  while (uncovered > 0) {
    int pick = -1;
    int pick_gain = -1;
    for (size_t t = 0; t < full.trees.size(); ++t) {
      if (taken[t]) continue;
      int gain = 0;
      for (int e = 0; e < inst.physical().edge_count(); ++e)
        if (!is_critical[e] && !covered[e] && protects_edge[t][e]) ++gain;
      if (gain > pick_gain) {   // first max wins: candidates are in canonical order
        pick_gain = gain;
        pick = static_cast<int>(t);
      }
    }
    if (pick < 0 || pick_gain == 0)
      throw Error("protected edge not coverable by any spanning tree");   // contradicts the shared-set identity
    taken[pick] = 1;
    base.trees.push_back(full.trees[pick]);
    for (int e = 0; e < inst.physical().edge_count(); ++e)
      if (!is_critical[e] && !covered[e] && protects_edge[pick][e]) {
        covered[e] = 1;
        --uncovered;
      }
  }
  if (base.trees.empty()) base.trees.push_back(full.trees.front());
  return base;
}

SurvivableDecision is_survivable(const CrossLayerInstance& inst, const PoolPolicy& policy) {
  inst.require_valid();
  SearchState st(inst, policy);
  LinkMapping witness;
  SurvivableDecision d;
  d.exhaustive = policy.exhaustive();
  d.survivable = search_witness(st, 0, witness);
  if (d.survivable) d.witness = std::move(witness);
  return d;
}

SurvivableDecision is_survivable(const CrossLayerInstance& inst) {
  return is_survivable(inst, PoolPolicy::default_for(inst));
}

int k_min(const CrossLayerInstance& inst, const PoolPolicy& policy) {
  CrossLayerInstance uniform = apply_model(inst, FailureModel::unified(0.1));
  SurvivabilityReport rep = max_survivable_prob(uniform, policy);
  return static_cast<int>(rep.critical.edges.size());
}

int k_min(const CrossLayerInstance& inst) { return k_min(inst, PoolPolicy::default_for(inst)); }

}  // namespace xlayer
