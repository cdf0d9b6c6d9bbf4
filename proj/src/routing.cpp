#include "xlayer/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace xlayer {

using ordered_json = nlohmann::ordered_json;

PhysicalPath make_path(const PhysicalNetwork& phys, std::vector<int> nodes) {
  if (nodes.empty()) throw Error("empty path");
  // Canonical direction: smaller endpoint id first.
  if (phys.graph().node_id(nodes.back()) < phys.graph().node_id(nodes.front()))
    std::reverse(nodes.begin(), nodes.end());
  PhysicalPath p;
  p.nodes = std::move(nodes);
  std::set<int> seen(p.nodes.begin(), p.nodes.end());
  if (seen.size() != p.nodes.size()) throw Error("path repeats a node");
  p.edges.reserve(p.nodes.size() - 1);
  for (size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    auto e = phys.graph().find_edge(p.nodes[i], p.nodes[i + 1]);
    if (!e) throw Error("path uses a non-existent physical edge");
    p.edges.push_back(*e);
  }
  return p;
}

double path_weight(const PhysicalNetwork& phys, const PhysicalPath& p) {
  double w = 0.0;
  for (int e : p.edges) w += edge_weight(phys.rho(e));
  return w;
}

PoolPolicy PoolPolicy::all_simple() { return PoolPolicy{Kind::AllSimple, 0, 0}; }

PoolPolicy PoolPolicy::hop_bounded(int h) {
  if (h < 1) throw Error("hop bound must be at least 1");
  return PoolPolicy{Kind::HopBounded, h, 0};
}

PoolPolicy PoolPolicy::k_shortest(int k) {
  if (k < 1) throw Error("k-shortest needs k >= 1");
  return PoolPolicy{Kind::KShortest, 0, k};
}

PoolPolicy PoolPolicy::parse(const std::string& text) {
  if (text == "all") return all_simple();
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  if (colon != std::string::npos) {
    int n = 0;
    try {
      size_t used = 0;
      n = std::stoi(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw Error("malformed pool policy: " + text);
    }
    if (head == "k-shortest") return k_shortest(n);
    if (head == "hops") return hop_bounded(n);
  }
  throw Error("unknown pool policy: " + text + " (expected all, k-shortest:K, hops:H)");
}

std::string PoolPolicy::describe() const {
  switch (kind) {
    case Kind::AllSimple:
      return "all";
    case Kind::HopBounded:
      return "hops:" + std::to_string(hop_bound);
    case Kind::KShortest:
      return "k-shortest:" + std::to_string(k);
  }
  return "?";
}

PoolPolicy PoolPolicy::default_for(const CrossLayerInstance& inst) {
  return inst.physical().node_count() <= 12 ? all_simple() : k_shortest(16);
}

namespace {

struct PathLess {
  const PhysicalNetwork* phys;
  bool operator()(const PhysicalPath& a, const PhysicalPath& b) const {
    double wa = path_weight(*phys, a);
    double wb = path_weight(*phys, b);
    if (wa != wb) return wa < wb;
    if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
    // Lexicographic on the node-id sequence.
    size_t n = a.nodes.size();
    for (size_t i = 0; i < n; ++i) {
      const auto& ia = phys->graph().node_id(a.nodes[i]);
      const auto& ib = phys->graph().node_id(b.nodes[i]);
      if (ia != ib) return ia < ib;
    }
    return false;
  }
};

void dfs_paths(const PhysicalNetwork& phys, int at, int target, int hop_limit,
               std::vector<int>& trail, std::vector<char>& on_trail,
               std::vector<PhysicalPath>& out) {
  if (at == target) {
    out.push_back(make_path(phys, trail));
    return;
  }
  if (hop_limit >= 0 && static_cast<int>(trail.size()) > hop_limit) return;
  for (auto [w, e] : phys.graph().neighbors(at)) {
    if (on_trail[w]) continue;
    on_trail[w] = 1;
    trail.push_back(w);
    dfs_paths(phys, w, target, hop_limit, trail, on_trail, out);
    trail.pop_back();
    on_trail[w] = 0;
  }
}

// Dijkstra restricted to non-banned nodes/edges; used as the Yen subroutine.
// Deterministic: ties resolved by smaller predecessor-built node sequence via
// fixed scan order of the sorted adjacency.
std::optional<std::vector<int>> shortest_path(const PhysicalNetwork& phys, int s, int t,
                                              const std::vector<char>& node_banned,
                                              const std::vector<char>& edge_banned) {
  int n = phys.node_count();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  std::vector<char> done(n, 0);
  dist[s] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, s});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    if (v == t) break;
    for (auto [w, e] : phys.graph().neighbors(v)) {
      if (node_banned[w] || edge_banned[e] || done[w]) continue;
      double nd = d + edge_weight(phys.rho(e));
      if (nd < dist[w] - 1e-18) {
        dist[w] = nd;
        prev[w] = v;
        heap.push({nd, w});
      }
    }
  }
  if (!done[t]) return std::nullopt;
  std::vector<int> nodes;
  for (int v = t; v != -1; v = prev[v]) nodes.push_back(v);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

std::vector<PhysicalPath> yen_k_shortest(const PhysicalNetwork& phys, int s, int t, int k) {
  std::vector<std::vector<int>> found;   // node sequences, s -> t
  std::vector<char> no_node(phys.node_count(), 0);
  std::vector<char> no_edge(phys.edge_count(), 0);
  auto first = shortest_path(phys, s, t, no_node, no_edge);
  if (!first) return {};
  found.push_back(*first);

  struct Cand {
    double cost;
    std::vector<int> nodes;
    bool operator<(const Cand& o) const {
      if (cost != o.cost) return cost > o.cost;   // min-heap by cost
      return nodes > o.nodes;                     // then smaller sequence first
    }
  };
  auto seq_cost = [&](const std::vector<int>& nodes) {
    double c = 0.0;
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
      c += edge_weight(phys.rho(*phys.graph().find_edge(nodes[i], nodes[i + 1])));
    return c;
  };
  std::priority_queue<Cand> cands;
  std::set<std::vector<int>> queued;

  while (static_cast<int>(found.size()) < k) {
    const auto& last = found.back();
    for (size_t spur = 0; spur + 1 < last.size(); ++spur) {
      std::vector<int> root(last.begin(), last.begin() + spur + 1);
      std::vector<char> node_banned(phys.node_count(), 0);
      std::vector<char> edge_banned(phys.edge_count(), 0);
      for (size_t i = 0; i < spur; ++i) node_banned[last[i]] = 1;
      for (const auto& p : found) {
        if (p.size() > spur && std::equal(root.begin(), root.end(), p.begin()))
          edge_banned[*phys.graph().find_edge(p[spur], p[spur + 1])] = 1;
      }
      auto tail = shortest_path(phys, last[spur], t, node_banned, edge_banned);
      if (!tail) continue;
      std::vector<int> whole(root.begin(), root.end() - 1);
      whole.insert(whole.end(), tail->begin(), tail->end());
      if (queued.insert(whole).second) cands.push({seq_cost(whole), whole});
    }
    if (cands.empty()) break;
    found.push_back(cands.top().nodes);
    cands.pop();
  }

  std::vector<PhysicalPath> out;
  out.reserve(found.size());
  for (auto& nodes : found) out.push_back(make_path(phys, std::move(nodes)));
  return out;
}

}  // namespace

std::vector<PhysicalPath> candidate_paths_between(const PhysicalNetwork& phys, int s, int t,
                                                  const PoolPolicy& policy) {
  if (s == t) throw Error("path endpoints coincide");
  std::vector<PhysicalPath> out;
  if (policy.kind == PoolPolicy::Kind::KShortest) {
    out = yen_k_shortest(phys, s, t, policy.k);
  } else {
    int hop_limit = policy.kind == PoolPolicy::Kind::HopBounded ? policy.hop_bound : -1;
    std::vector<int> trail{s};
    std::vector<char> on_trail(phys.node_count(), 0);
    on_trail[s] = 1;
    dfs_paths(phys, s, t, hop_limit, trail, on_trail, out);
  }
  std::sort(out.begin(), out.end(), PathLess{&phys});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty())
    throw Error("no physical route between " + phys.graph().node_id(s) + " and " +
                phys.graph().node_id(t) + " under policy " + policy.describe());
  return out;
}

std::vector<PhysicalPath> candidate_paths(const CrossLayerInstance& inst, int mu,
                                          const PoolPolicy& policy) {
  const Edge& le = inst.logical().graph().edge(mu);
  int s = inst.mapped_node(le.u);
  int t = inst.mapped_node(le.v);
  if (s < 0 || t < 0) throw Error("logical edge has unmapped endpoint");
  return candidate_paths_between(inst.physical(), s, t, policy);
}

const PhysicalPath& LinkMapping::route(int logical_edge) const {
  if (logical_edge < 0 || logical_edge >= size() || routes_[logical_edge].nodes.empty())
    throw Error("logical edge has no route");
  return routes_[logical_edge];
}

bool LinkMapping::total() const {
  if (routes_.empty()) return false;
  return std::all_of(routes_.begin(), routes_.end(),
                     [](const PhysicalPath& p) { return !p.nodes.empty(); });
}

std::vector<int> LinkMapping::used_edges() const {
  std::set<int> u;
  for (const auto& r : routes_) u.insert(r.edges.begin(), r.edges.end());
  return {u.begin(), u.end()};
}

std::string LinkMapping::canonical_key(const CrossLayerInstance& inst) const {
  std::ostringstream os;
  for (int mu = 0; mu < size(); ++mu) {
    const Edge& le = inst.logical().graph().edge(mu);
    os << inst.logical().graph().node_id(le.u) << "~" << inst.logical().graph().node_id(le.v)
       << ":";
    if (!routes_[mu].nodes.empty()) {
      for (size_t i = 0; i < routes_[mu].nodes.size(); ++i) {
        if (i) os << "-";
        os << inst.physical().graph().node_id(routes_[mu].nodes[i]);
      }
    }
    os << ";";
  }
  return os.str();
}

std::vector<Violation> validate_mapping(const CrossLayerInstance& inst, const LinkMapping& m) {
  std::vector<Violation> out;
  if (m.size() != inst.logical().edge_count()) {
    out.push_back({"mapping-size", "mapping does not cover every logical edge"});
    return out;
  }
  for (int mu = 0; mu < m.size(); ++mu) {
    const auto& r = m.routes()[mu];
    const Edge& le = inst.logical().graph().edge(mu);
    std::string tag = inst.logical().graph().node_id(le.u) + "-" +
                      inst.logical().graph().node_id(le.v);
    if (r.nodes.empty()) {
      out.push_back({"mapping-missing-route", "logical edge " + tag + " has no route"});
      continue;
    }
    int a = inst.mapped_node(le.u);
    int b = inst.mapped_node(le.v);
    bool ends_ok = (r.endpoint_a() == a && r.endpoint_b() == b) ||
                   (r.endpoint_a() == b && r.endpoint_b() == a);
    if (!ends_ok)
      out.push_back({"mapping-endpoints", "route of " + tag + " does not join the mapped images"});
  }
  return out;
}

std::vector<int> co_mapping(const std::vector<int>& tau_edges, const LinkMapping& m,
                            const PhysicalNetwork& phys) {
  std::vector<char> used(phys.edge_count(), 0);
  for (int mu : tau_edges) {
    const PhysicalPath& r = m.route(mu);
    for (int e : r.edges) used[e] = 1;
  }
  std::vector<int> out;
  for (int e = 0; e < phys.edge_count(); ++e)
    if (!used[e]) out.push_back(e);
  return out;
}

LinkMapping parse_mapping(const CrossLayerInstance& inst, const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("mapping is not valid JSON: ") + ex.what());
  }
  if (!j.is_object() || !j.contains("routes") || !j["routes"].is_array())
    throw ParseError("mapping must be {\"routes\": [...]}");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "routes") throw ParseError("unknown key \"" + it.key() + "\" in mapping");

  std::vector<PhysicalPath> routes(inst.logical().edge_count());
  std::vector<char> have(inst.logical().edge_count(), 0);
  for (const auto& r : j["routes"]) {
    if (!r.is_object() || !r.contains("edge") || !r.contains("path"))
      throw ParseError("each route needs \"edge\" and \"path\"");
    for (auto it = r.begin(); it != r.end(); ++it)
      if (it.key() != "edge" && it.key() != "path")
        throw ParseError("unknown key \"" + it.key() + "\" in route");
    if (!r["edge"].is_array() || r["edge"].size() != 2)
      throw ParseError("route \"edge\" must be a two-element array");
    std::string su = r["edge"][0].is_string() ? r["edge"][0].get<std::string>()
                                              : r["edge"][0].dump();
    std::string sv = r["edge"][1].is_string() ? r["edge"][1].get<std::string>()
                                              : r["edge"][1].dump();
    auto lu = inst.logical().graph().find_node(su);
    auto lv = inst.logical().graph().find_node(sv);
    if (!lu || !lv) throw ParseError("route names unknown logical nodes: " + su + ", " + sv);
    auto mu = inst.logical().graph().find_edge(*lu, *lv);
    if (!mu) throw ParseError("route names a non-existent logical edge: " + su + "-" + sv);
    if (have[*mu]) throw ParseError("duplicate route for logical edge " + su + "-" + sv);
    if (!r["path"].is_array() || r["path"].size() < 2)
      throw ParseError("route \"path\" must list at least two nodes");
    std::vector<int> nodes;
    for (const auto& nid : r["path"]) {
      std::string s = nid.is_string() ? nid.get<std::string>() : nid.dump();
      nodes.push_back(inst.physical().graph().index_of(s));
    }
    routes[*mu] = make_path(inst.physical(), std::move(nodes));
    have[*mu] = 1;
  }
  for (int mu = 0; mu < inst.logical().edge_count(); ++mu)
    if (!have[mu]) {
      const Edge& le = inst.logical().graph().edge(mu);
      throw ParseError("mapping misses logical edge " + inst.logical().graph().node_id(le.u) +
                       "-" + inst.logical().graph().node_id(le.v));
    }
  LinkMapping m(std::move(routes));
  auto bad = validate_mapping(inst, m);
  if (!bad.empty()) throw ParseError("invalid mapping: " + bad.front().message);
  return m;
}

std::string serialize_mapping(const CrossLayerInstance& inst, const LinkMapping& m) {
  ordered_json routes = ordered_json::array();
  for (int mu = 0; mu < m.size(); ++mu) {
    const Edge& le = inst.logical().graph().edge(mu);
    ordered_json path = ordered_json::array();
    for (int v : m.route(mu).nodes) path.push_back(inst.physical().graph().node_id(v));
    routes.push_back({{"edge", {inst.logical().graph().node_id(le.u),
                                inst.logical().graph().node_id(le.v)}},
                      {"path", path}});
  }
  ordered_json j;
  j["routes"] = routes;
  return j.dump(2) + "\n";
}

}  // namespace xlayer
