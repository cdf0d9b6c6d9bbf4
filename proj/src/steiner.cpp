#include "xlayer/steiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace xlayer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_steiner_instance(const SteinerInstance& si) {
  if (si.terminals.size() < 2) throw Error("steiner instance needs at least 2 terminals");
  for (int t : si.terminals)
    if (t < 0 || t >= si.graph.node_count()) throw Error("terminal outside the physical network");
  if (static_cast<int>(si.costs.size()) != si.graph.edge_count())
    throw Error("steiner cost vector does not match edge count");
  for (double c : si.costs)
    if (!(c >= 0.0) || !std::isfinite(c)) throw Error("steiner costs must be nonnegative finite");
}

// Extracts the minimal tree inside `edge_set` that spans all terminals:
// BFS tree of the component holding them, then repeated pruning of
// non-terminal leaves. Throws if the terminals are not connected in the set.
SteinerTree tree_from_edges(const SteinerInstance& si, const std::vector<char>& edge_in) {
  const UndirectedGraph& g = si.graph.graph();
  int n = g.node_count();
  std::vector<int> parent_edge(n, -1);
  std::vector<char> seen(n, 0);
  std::vector<int> queue{si.terminals[0]};
  seen[si.terminals[0]] = 1;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (auto [w, e] : g.neighbors(v)) {
      if (!edge_in[e] || seen[w]) continue;
      seen[w] = 1;
      parent_edge[w] = e;
      queue.push_back(w);
    }
  }
  for (int t : si.terminals)
    if (!seen[t]) throw Error("terminals are disconnected in the candidate edge set");

  std::vector<char> keep(si.graph.edge_count(), 0);
  std::vector<int> degree(n, 0);
  for (int v : queue) {
    if (parent_edge[v] < 0) continue;
    keep[parent_edge[v]] = 1;
    degree[g.edge(parent_edge[v]).u]++;
    degree[g.edge(parent_edge[v]).v]++;
  }
  std::vector<char> is_terminal(n, 0);
  for (int t : si.terminals) is_terminal[t] = 1;
  bool pruned = true;
  while (pruned) {
    pruned = false;
    for (int e = 0; e < si.graph.edge_count(); ++e) {
      if (!keep[e]) continue;
      const Edge& ed = g.edge(e);
      int leaf = -1;
      if (degree[ed.u] == 1 && !is_terminal[ed.u]) leaf = ed.u;
      else if (degree[ed.v] == 1 && !is_terminal[ed.v]) leaf = ed.v;
      if (leaf < 0) continue;
      keep[e] = 0;
      degree[ed.u]--;
      degree[ed.v]--;
      pruned = true;
    }
  }

  SteinerTree out;
  std::set<int> nodes;
  for (int e = 0; e < si.graph.edge_count(); ++e) {
    if (!keep[e]) continue;
    out.edges.push_back(e);
    out.cost += si.costs[e];
    nodes.insert(g.edge(e).u);
    nodes.insert(g.edge(e).v);
  }
  if (out.edges.empty()) nodes.insert(si.terminals.begin(), si.terminals.end());
  out.nodes.assign(nodes.begin(), nodes.end());
  return out;
}

}  // namespace

SteinerInstance steiner_instance_of(const CrossLayerInstance& inst) {
  SteinerInstance si;
  si.graph = inst.physical();
  si.terminals = inst.terminal_nodes();
  si.costs.resize(inst.physical().edge_count());
  for (int e = 0; e < inst.physical().edge_count(); ++e)
    si.costs[e] = edge_weight(inst.physical().rho(e));
  return si;
}

SteinerTree steiner_exact(const SteinerInstance& si, int terminal_bound) {
  check_steiner_instance(si);
  int k = static_cast<int>(si.terminals.size());
  if (k > terminal_bound)
    throw Error("terminal count " + std::to_string(k) + " exceeds the exact bound " +
                std::to_string(terminal_bound));
  const UndirectedGraph& g = si.graph.graph();
  int n = g.node_count();
  int full = (1 << k) - 1;

  // dp[S][v]: cheapest tree spanning terminals of S plus node v.
  // decision: merge into two subsets at v, or extend along an edge.
  std::vector<std::vector<double>> dp(full + 1, std::vector<double>(n, kInf));
  struct Back {
    int kind = -1;   // 0 = base, 1 = merge(sub), 2 = edge from u
    int sub = 0;
    int from = -1;
    int via_edge = -1;
  };
  std::vector<std::vector<Back>> back(full + 1, std::vector<Back>(n));

  auto dijkstra_layer = [&](int S) {
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int v = 0; v < n; ++v)
      if (dp[S][v] < kInf) heap.push({dp[S][v], v});
    std::vector<char> done(n, 0);
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (done[v] || d > dp[S][v]) continue;
      done[v] = 1;
      for (auto [w, e] : g.neighbors(v)) {
        double nd = d + si.costs[e];
        if (nd < dp[S][w] - 1e-15) {
          dp[S][w] = nd;
          back[S][w] = {2, 0, v, e};
          heap.push({nd, w});
        }
      }
    }
  };

  for (int i = 0; i < k; ++i) {
    dp[1 << i][si.terminals[i]] = 0.0;
    back[1 << i][si.terminals[i]] = {0, 0, -1, -1};
    dijkstra_layer(1 << i);
  }
  for (int S = 1; S <= full; ++S) {
    if ((S & (S - 1)) == 0) continue;   // singletons done above
    for (int v = 0; v < n; ++v) {
      // smallest proper submask first => deterministic merge choice
      for (int T = (S - 1) & S; T > 0; T = (T - 1) & S) {
        if (T > (S ^ T)) continue;   // each split once
        double c = dp[T][v] + dp[S ^ T][v];
        if (c < dp[S][v] - 1e-15) {
          dp[S][v] = c;
          back[S][v] = {1, T, -1, -1};
        }
      }
    }
    dijkstra_layer(S);
  }

  int root = si.terminals[0];
  if (dp[full][root] >= kInf) throw Error("terminals are disconnected");

  std::vector<char> chosen(si.graph.edge_count(), 0);
  std::vector<std::pair<int, int>> stack{{full, root}};
  while (!stack.empty()) {
    auto [S, v] = stack.back();
    stack.pop_back();
    const Back& b = back[S][v];
    if (b.kind == 0) continue;
    if (b.kind == 1) {
      stack.push_back({b.sub, v});
      stack.push_back({S ^ b.sub, v});
    } else if (b.kind == 2) {
      chosen[b.via_edge] = 1;
      stack.push_back({S, b.from});
    } else {
      throw Error("steiner reconstruction hit an unset state");
    }
  }
  SteinerTree out = tree_from_edges(si, chosen);
  if (std::abs(out.cost - dp[full][root]) > 1e-9 * std::max(1.0, dp[full][root]))
    throw Error("steiner reconstruction cost mismatch");
  return out;
}

SteinerTree steiner_2approx(const SteinerInstance& si) {
  check_steiner_instance(si);
  const UndirectedGraph& g = si.graph.graph();
  int n = g.node_count();
  int k = static_cast<int>(si.terminals.size());

  // Shortest paths from every terminal.
  std::vector<std::vector<double>> dist(k, std::vector<double>(n, kInf));
  std::vector<std::vector<int>> via(k, std::vector<int>(n, -1));   // edge into node
  for (int i = 0; i < k; ++i) {
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[i][si.terminals[i]] = 0.0;
    heap.push({0.0, si.terminals[i]});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[i][v]) continue;
      for (auto [w, e] : g.neighbors(v)) {
        double nd = d + si.costs[e];
        if (nd < dist[i][w] - 1e-15) {
          dist[i][w] = nd;
          via[i][w] = e;
          heap.push({nd, w});
        }
      }
    }
  }
  for (int i = 0; i < k; ++i)
    if (dist[i][si.terminals[0]] >= kInf) throw Error("terminals are disconnected");

  // MST over the terminal metric closure (Prim, deterministic scan order).
  std::vector<char> in_tree(k, 0);
  std::vector<double> best(k, kInf);
  std::vector<int> join(k, -1);
  in_tree[0] = 1;
  for (int j = 1; j < k; ++j) {
    best[j] = dist[0][si.terminals[j]];
    join[j] = 0;
  }
  std::vector<char> chosen(si.graph.edge_count(), 0);
  for (int round = 1; round < k; ++round) {
    int pick = -1;
    for (int j = 0; j < k; ++j)
      if (!in_tree[j] && (pick < 0 || best[j] < best[pick])) pick = j;
    in_tree[pick] = 1;
    // unfold the closure edge into its physical path
    int src = join[pick];
    for (int v = si.terminals[pick]; v != si.terminals[src];) {
      int e = via[src][v];
      chosen[e] = 1;
      const Edge& ed = g.edge(e);
      v = (ed.u == v) ? ed.v : ed.u;
    }
    for (int j = 0; j < k; ++j)
      if (!in_tree[j] && dist[pick][si.terminals[j]] < best[j]) {
        best[j] = dist[pick][si.terminals[j]];
        join[j] = pick;
      }
  }
  return tree_from_edges(si, chosen);
}

namespace {

// First spanning tree of the logical net in edge-index order (Kruskal greedy).
std::vector<int> first_logical_tree(const LogicalNetwork& gl) {
  std::vector<int> parent(gl.node_count());
  for (int i = 0; i < gl.node_count(); ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> tau;
  for (int e = 0; e < gl.edge_count() && static_cast<int>(tau.size()) + 1 < gl.node_count();
       ++e) {
    int a = find(gl.graph().edge(e).u);
    int b = find(gl.graph().edge(e).v);
    if (a == b) continue;
    parent[a] = b;
    tau.push_back(e);
  }
  if (static_cast<int>(tau.size()) + 1 != gl.node_count())
    throw Error("logical network is disconnected");
  return tau;
}

// Unique path between two nodes inside a tree given as an edge set.
std::vector<int> tree_path_nodes(const UndirectedGraph& g, const std::vector<char>& in_tree,
                                 int s, int t) {
  std::vector<int> prev(g.node_count(), -2);
  std::vector<int> queue{s};
  prev[s] = -1;
  for (size_t qi = 0; qi < queue.size() && prev[t] == -2; ++qi) {
    int v = queue[qi];
    for (auto [w, e] : g.neighbors(v)) {
      if (!in_tree[e] || prev[w] != -2) continue;
      prev[w] = v;
      queue.push_back(w);
    }
  }
  if (prev[t] == -2) throw Error("tree path endpoints are disconnected");
  std::vector<int> nodes;
  for (int v = t; v != -1; v = prev[v]) nodes.push_back(v);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

LinkMapping route_along_tree(const CrossLayerInstance& inst, const std::vector<int>& tau,
                             const SteinerTree& tree) {
  std::vector<char> in_tree(inst.physical().edge_count(), 0);
  for (int e : tree.edges) in_tree[e] = 1;
  std::vector<PhysicalPath> routes(inst.logical().edge_count());
  for (int mu : tau) {
    const Edge& le = inst.logical().graph().edge(mu);
    routes[mu] = make_path(inst.physical(),
                           tree_path_nodes(inst.physical().graph(), in_tree,
                                           inst.mapped_node(le.u), inst.mapped_node(le.v)));
  }
  return LinkMapping(std::move(routes));
}

}  // namespace

MaxProtectingTreeResult max_protecting_tree(const CrossLayerInstance& inst, int terminal_bound) {
  inst.require_valid();
  SteinerInstance si = steiner_instance_of(inst);
  MaxProtectingTreeResult out;
  if (static_cast<int>(si.terminals.size()) <= terminal_bound) {
    out.steiner = steiner_exact(si, terminal_bound);
    out.exact = true;
  } else {
    out.steiner = steiner_2approx(si);
    out.exact = false;
  }
  std::vector<int> tau = first_logical_tree(inst.logical());
  out.tree = ProtectingTree{tau, route_along_tree(inst, tau, out.steiner)};
  if (used_edges(out.tree) != out.steiner.edges)
    throw Error("routed tree does not use exactly the Steiner edges");
  out.neg_log = out.steiner.cost;
  out.prob = std::exp(-out.steiner.cost);
  return out;
}

namespace {

bool terminals_connected_in(const SteinerInstance& si, const std::vector<char>& edge_in) {
  const UndirectedGraph& g = si.graph.graph();
  std::vector<char> seen(g.node_count(), 0);
  std::vector<int> queue{si.terminals[0]};
  seen[si.terminals[0]] = 1;
  for (size_t qi = 0; qi < queue.size(); ++qi)
    for (auto [w, e] : g.neighbors(queue[qi]))
      if (edge_in[e] && !seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
  for (int t : si.terminals)
    if (!seen[t]) return false;
  return true;
}

}  // namespace

std::optional<std::pair<SteinerTree, SteinerTree>> two_disjoint_steiner(
    const SteinerInstance& si, int exhaustive_edge_bound) {
  check_steiner_instance(si);
  int m = si.graph.edge_count();

  auto verify_pair = [&](const SteinerTree& a, const SteinerTree& b) {
    std::vector<int> overlap;
    std::set_intersection(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
                          std::back_inserter(overlap));
    if (!overlap.empty()) throw Error("disjoint tree pair overlaps");
    for (const SteinerTree* t : {&a, &b}) {
      std::vector<char> in(m, 0);
      for (int e : t->edges) in[e] = 1;
      if (!terminals_connected_in(si, in)) throw Error("tree of the pair misses a terminal");
    }
  };

  if (m <= exhaustive_edge_bound) {
    // Every split of E_P; by symmetry edge 0 goes to the first side.
    std::vector<char> side_a(m, 0);
    std::vector<char> side_b(m, 0);
    for (unsigned long long mask = 0; mask < (1ULL << (m - 1)); ++mask) {
      unsigned long long bits = (mask << 1) | 1ULL;
      for (int e = 0; e < m; ++e) {
        side_a[e] = (bits >> e) & 1ULL;
        side_b[e] = !side_a[e];
      }
      if (!terminals_connected_in(si, side_a)) continue;
      if (!terminals_connected_in(si, side_b)) continue;
      SteinerTree a = tree_from_edges(si, side_a);
      SteinerTree b = tree_from_edges(si, side_b);
      verify_pair(a, b);
      return std::make_pair(a, b);
    }
    return std::nullopt;
  }

  // Greedy attempt only: approximate tree, then a second one in the complement.
  SteinerTree first = steiner_2approx(si);
  std::vector<char> remaining(m, 1);
  for (int e : first.edges) remaining[e] = 0;
  if (!terminals_connected_in(si, remaining)) return std::nullopt;
  SteinerTree second = tree_from_edges(si, remaining);
  verify_pair(first, second);
  return std::make_pair(first, second);
}

bool augment_and_check(const CrossLayerInstance& inst) {
  inst.require_valid();
  auto pair = two_disjoint_steiner(steiner_instance_of(inst));
  if (!pair) return false;

  // Duplicate every logical edge; route one copy per tree. The two routes of
  // a logical edge are edge-disjoint, so no single physical failure can drop
  // both copies — verified below by simulating every failure.
  std::vector<char> in_a(inst.physical().edge_count(), 0);
  std::vector<char> in_b(inst.physical().edge_count(), 0);
  for (int e : pair->first.edges) in_a[e] = 1;
  for (int e : pair->second.edges) in_b[e] = 1;

  int el = inst.logical().edge_count();
  std::vector<PhysicalPath> route_a(el);
  std::vector<PhysicalPath> route_b(el);
  for (int mu = 0; mu < el; ++mu) {
    const Edge& le = inst.logical().graph().edge(mu);
    int s = inst.mapped_node(le.u);
    int t = inst.mapped_node(le.v);
    route_a[mu] = make_path(inst.physical(), tree_path_nodes(inst.physical().graph(), in_a, s, t));
    route_b[mu] = make_path(inst.physical(), tree_path_nodes(inst.physical().graph(), in_b, s, t));
  }

  for (int e = 0; e < inst.physical().edge_count(); ++e) {
    std::vector<char> alive(el, 0);
    for (int mu = 0; mu < el; ++mu) {
      bool a_ok = std::find(route_a[mu].edges.begin(), route_a[mu].edges.end(), e) ==
                  route_a[mu].edges.end();
      bool b_ok = std::find(route_b[mu].edges.begin(), route_b[mu].edges.end(), e) ==
                  route_b[mu].edges.end();
      alive[mu] = a_ok || b_ok;
    }
    if (!inst.logical().graph().connected_with(alive))
      throw Error("augmented routing failed a failure simulation");
  }
  return true;
}

int edge_connectivity(const PhysicalNetwork& g, const std::vector<int>& among) {
  if (among.size() < 2) throw Error("edge connectivity needs at least two nodes");
  const UndirectedGraph& ug = g.graph();
  int n = ug.node_count();

  // unit-capacity max-flow (augmenting BFS); antiparallel arc per edge
  auto max_flow = [&](int s, int t) {
    std::vector<std::vector<int>> cap(n, std::vector<int>(n, 0));
    for (int e = 0; e < ug.edge_count(); ++e) {
      cap[ug.edge(e).u][ug.edge(e).v] += 1;
      cap[ug.edge(e).v][ug.edge(e).u] += 1;
    }
    int flow = 0;
    while (true) {
      std::vector<int> prev(n, -1);
      std::vector<int> queue{s};
      prev[s] = s;
      for (size_t qi = 0; qi < queue.size() && prev[t] < 0; ++qi) {
        int v = queue[qi];
        for (int w = 0; w < n; ++w)
          if (cap[v][w] > 0 && prev[w] < 0) {
            prev[w] = v;
            queue.push_back(w);
          }
      }
      if (prev[t] < 0) break;
      for (int v = t; v != s; v = prev[v]) {
        cap[prev[v]][v] -= 1;
        cap[v][prev[v]] += 1;
      }
      ++flow;
    }
    return flow;
  };

  int best = std::numeric_limits<int>::max();
  for (size_t i = 0; i < among.size(); ++i)
    for (size_t j = i + 1; j < among.size(); ++j)
      best = std::min(best, max_flow(among[i], among[j]));
  return best;
}

}  // namespace xlayer
