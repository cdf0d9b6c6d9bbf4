#include "xlayer/tree_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>

namespace xlayer {

std::vector<int> used_edges(const ProtectingTree& lambda) {
  std::set<int> u;
  for (int mu : lambda.tau) {
    const PhysicalPath& r = lambda.routing.route(mu);
    u.insert(r.edges.begin(), r.edges.end());
  }
  return {u.begin(), u.end()};
}

namespace {

// Integer determinant via Bareiss; exact as long as every intermediate fits
// in 64 bits (checked through 128-bit multiplication).
long long bareiss_det(std::vector<std::vector<long long>> a) {
  int n = static_cast<int>(a.size());
  if (n == 0) return 1;
  long long sign = 1;
  long long prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int swap_row = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i][k] != 0) {
          swap_row = i;
          break;
        }
      if (swap_row < 0) return 0;
      std::swap(a[k], a[swap_row]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        __int128 num = static_cast<__int128>(a[i][j]) * a[k][k] -
                       static_cast<__int128>(a[i][k]) * a[k][j];
        __int128 q = num / prev;   // divides exactly (Bareiss identity)
        if (q > INT64_MAX || q < INT64_MIN)
          throw Error("spanning tree count overflows 64-bit arithmetic");
        a[i][j] = static_cast<long long>(q);
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Can the components of `dsu` still be connected using edges[from..]?
bool completable(const UndirectedGraph& g, Dsu dsu, int from, int needed) {
  for (int e = from; e < g.edge_count() && needed > 0; ++e)
    if (dsu.join(g.edge(e).u, g.edge(e).v)) --needed;
  return needed == 0;
}

void enumerate_rec(const UndirectedGraph& g, int from, Dsu& dsu, int components,
                   std::vector<int>& chosen, std::vector<std::vector<int>>& out) {
  if (components == 1) {
    out.push_back(chosen);
    return;
  }
  if (from == g.edge_count()) return;
  const Edge& e = g.edge(from);
  int ru = dsu.find(e.u);
  int rv = dsu.find(e.v);
  if (ru == rv) {
    enumerate_rec(g, from + 1, dsu, components, chosen, out);
    return;
  }
  {
    Dsu with = dsu;
    with.join(ru, rv);
    chosen.push_back(from);
    enumerate_rec(g, from + 1, with, components - 1, chosen, out);
    chosen.pop_back();
  }
  if (completable(g, dsu, from + 1, components - 1))
    enumerate_rec(g, from + 1, dsu, components, chosen, out);
}

}  // namespace

long long spanning_tree_count(const UndirectedGraph& g) {
  int n = g.node_count();
  if (n == 0) return 0;
  if (n == 1) return 1;
  if (!g.connected()) return 0;
  // Laplacian minor: drop the last row/column.
  std::vector<std::vector<long long>> lap(n - 1, std::vector<long long>(n - 1, 0));
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.u == ed.v) continue;
    if (ed.u < n - 1) lap[ed.u][ed.u] += 1;
    if (ed.v < n - 1) lap[ed.v][ed.v] += 1;
    if (ed.u < n - 1 && ed.v < n - 1) {
      lap[ed.u][ed.v] -= 1;
      lap[ed.v][ed.u] -= 1;
    }
  }
  return bareiss_det(std::move(lap));
}

std::vector<std::vector<int>> enumerate_spanning_trees(const LogicalNetwork& gl, long long limit) {
  const UndirectedGraph& g = gl.graph();
  long long count = spanning_tree_count(g);
  if (count > limit)
    throw Error("spanning tree count " + std::to_string(count) + " exceeds limit " +
                std::to_string(limit));
  std::vector<std::vector<int>> out;
  if (g.node_count() == 0) return out;
  out.reserve(static_cast<size_t>(count));
  Dsu dsu(g.node_count());
  std::vector<int> chosen;
  enumerate_rec(g, 0, dsu, g.node_count(), chosen, out);
  return out;
}

bool protects(const ProtectingTree& lambda, int e) {
  for (int mu : lambda.tau) {
    const auto& edges = lambda.routing.route(mu).edges;
    if (std::find(edges.begin(), edges.end(), e) != edges.end()) return false;
  }
  return true;
}

double tree_neg_log_weight(const PhysicalNetwork& phys, const ProtectingTree& lambda) {
  double w = 0.0;
  for (int e : used_edges(lambda)) w += edge_weight(phys.rho(e));
  return w;
}

double tree_survivable_prob(const PhysicalNetwork& phys, const ProtectingTree& lambda) {
  return std::exp(-tree_neg_log_weight(phys, lambda));
}

std::vector<int> shared_edges(const ProtectingTreeSet& set) {
  if (set.trees.empty()) throw Error("empty protecting tree set");
  std::vector<int> common = used_edges(set.trees.front());
  for (size_t i = 1; i < set.trees.size() && !common.empty(); ++i) {
    std::vector<int> next = used_edges(set.trees[i]);
    std::vector<int> both;
    std::set_intersection(common.begin(), common.end(), next.begin(), next.end(),
                          std::back_inserter(both));
    common = std::move(both);
  }
  return common;
}

double tree_set_neg_log_weight(const PhysicalNetwork& phys, const ProtectingTreeSet& set) {
  double w = 0.0;
  for (int e : shared_edges(set)) w += edge_weight(phys.rho(e));
  return w;
}

double tree_set_survivable_prob(const PhysicalNetwork& phys, const ProtectingTreeSet& set) {
  return std::exp(-tree_set_neg_log_weight(phys, set));
}

ProtectingTree route_tree(const std::vector<int>& tau, const LinkMapping& m) {
  ProtectingTree lambda;
  lambda.tau = tau;
  std::sort(lambda.tau.begin(), lambda.tau.end());
  std::vector<PhysicalPath> routes(m.size());
  for (int mu : lambda.tau) routes[mu] = m.route(mu);
  lambda.routing = LinkMapping(std::move(routes));
  return lambda;
}

}  // namespace xlayer
