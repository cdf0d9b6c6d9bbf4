#include "xlayer/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace xlayer {

using ordered_json = nlohmann::ordered_json;

UndirectedGraph::UndirectedGraph(std::vector<std::string> node_ids,
                                 const std::vector<std::pair<std::string, std::string>>& edges) {
  std::sort(node_ids.begin(), node_ids.end());
  node_ids.erase(std::unique(node_ids.begin(), node_ids.end()), node_ids.end());
  ids_ = std::move(node_ids);
  for (int i = 0; i < static_cast<int>(ids_.size()); ++i) index_[ids_[i]] = i;

  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    auto ia = index_.find(a);
    auto ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end())
      throw Error("edge endpoint not in node list: (" + a + ", " + b + ")");
    edges_.push_back(make_edge(ia->second, ib->second));
  }
  std::sort(edges_.begin(), edges_.end());

  adj_.assign(ids_.size(), {});
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    adj_[edges_[e].u].emplace_back(edges_[e].v, e);
    if (edges_[e].v != edges_[e].u) adj_[edges_[e].v].emplace_back(edges_[e].u, e);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

std::optional<int> UndirectedGraph::find_node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int UndirectedGraph::index_of(const std::string& id) const {
  auto idx = find_node(id);
  if (!idx) throw Error("unknown node id: " + id);
  return *idx;
}

std::optional<int> UndirectedGraph::find_edge(int a, int b) const {
  Edge want = make_edge(a, b);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), want);
  if (it == edges_.end() || *it != want) return std::nullopt;
  return static_cast<int>(it - edges_.begin());
}

bool UndirectedGraph::connected() const {
  return connected_with(std::vector<char>(edges_.size(), 1));
}

bool UndirectedGraph::connected_with(const std::vector<char>& edge_alive) const {
  if (ids_.empty()) return true;
  std::vector<char> seen(ids_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (auto [w, e] : adj_[v]) {
      if (!edge_alive[e] || seen[w]) continue;
      seen[w] = 1;
      ++reached;
      stack.push_back(w);
    }
  }
  return reached == node_count();
}

bool UndirectedGraph::has_self_loop() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.u == e.v; });
}

std::vector<int> UndirectedGraph::parallel_edges() const {
  std::vector<int> dups;
  for (int e = 1; e < edge_count(); ++e)
    if (edges_[e] == edges_[e - 1]) dups.push_back(e);
  return dups;
}

PhysicalNetwork::PhysicalNetwork(UndirectedGraph graph, std::vector<double> failure_probs)
    : graph_(std::move(graph)), rho_(std::move(failure_probs)) {
  if (static_cast<int>(rho_.size()) != graph_.edge_count())
    throw Error("failure probability list does not match edge count");
}

std::vector<Violation> PhysicalNetwork::structural_violations() const {
  std::vector<Violation> out;
  if (graph_.node_count() == 0) out.push_back({"physical-empty", "physical network has no nodes"});
  if (graph_.has_self_loop()) out.push_back({"physical-self-loop", "physical network has a self-loop"});
  if (!graph_.parallel_edges().empty())
    out.push_back({"physical-parallel-edge", "physical network has parallel edges"});
  if (!graph_.connected()) out.push_back({"physical-disconnected", "physical network is disconnected"});
  for (int e = 0; e < edge_count(); ++e) {
    double r = rho_[e];
    if (!(r >= 0.0) || !(r < 1.0) || std::isnan(r)) {
      const Edge& ed = graph_.edge(e);
      out.push_back({"rho-out-of-range",
                     "failure probability of (" + graph_.node_id(ed.u) + ", " + graph_.node_id(ed.v) +
                         ") must lie in [0, 1)"});
    }
  }
  return out;
}

std::vector<Violation> LogicalNetwork::structural_violations() const {
  std::vector<Violation> out;
  if (graph_.node_count() == 0) out.push_back({"logical-empty", "logical network has no nodes"});
  if (graph_.has_self_loop()) out.push_back({"logical-self-loop", "logical network has a self-loop"});
  if (!graph_.parallel_edges().empty())
    out.push_back({"logical-parallel-edge", "logical network has parallel edges"});
  if (!graph_.connected()) out.push_back({"logical-disconnected", "logical network is disconnected"});
  return out;
}

CrossLayerInstance::CrossLayerInstance(PhysicalNetwork physical, LogicalNetwork logical,
                                       NodeMapping node_map)
    : physical_(std::move(physical)), logical_(std::move(logical)), node_map_(std::move(node_map)) {
  resolved_.assign(logical_.node_count(), -1);
  for (const auto& [lid, pid] : node_map_.raw()) {
    auto li = logical_.graph().find_node(lid);
    auto pi = physical_.graph().find_node(pid);
    if (li && pi) resolved_[*li] = *pi;
  }
}

std::vector<int> CrossLayerInstance::terminal_nodes() const {
  std::set<int> t;
  for (int p : resolved_)
    if (p >= 0) t.insert(p);
  return {t.begin(), t.end()};
}

void CrossLayerInstance::require_valid() const {
  auto v = validate_instance(*this);
  if (v.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& w : v) msg += " [" + w.code + "] " + w.message + ";";
  throw Error(msg);
}

std::vector<Violation> validate_instance(const CrossLayerInstance& inst) {
  std::vector<Violation> out = inst.physical().structural_violations();
  auto lv = inst.logical().structural_violations();
  out.insert(out.end(), lv.begin(), lv.end());

  const auto& raw = inst.node_map().raw();
  for (const auto& [lid, pid] : raw) {
    if (!inst.logical().graph().find_node(lid))
      out.push_back({"map-unknown-logical", "node_map key is not a logical node: " + lid});
    if (!inst.physical().graph().find_node(pid))
      out.push_back({"map-unknown-physical", "node_map value is not a physical node: " + pid});
  }
  std::map<std::string, std::string> seen;   // physical id -> first logical id
  for (const auto& [lid, pid] : raw) {
    auto [it, fresh] = seen.emplace(pid, lid);
    if (!fresh)
      out.push_back({"map-not-injective",
                     "logical nodes " + it->second + " and " + lid + " both map onto " + pid});
  }
  for (int l = 0; l < inst.logical().node_count(); ++l)
    if (raw.find(inst.logical().graph().node_id(l)) == raw.end())
      out.push_back({"map-missing-node",
                     "logical node has no physical image: " + inst.logical().graph().node_id(l)});
  return out;
}

FailureModel FailureModel::unified(double rho) {
  if (!(rho >= 0.0) || !(rho < 1.0))
    throw Error("unified failure probability must lie in [0, 1)");
  FailureModel m;
  m.kind_ = Kind::Unified;
  m.rho_ = rho;
  return m;
}

FailureModel FailureModel::per_link(std::vector<double> rhos) {
  for (double r : rhos)
    if (!(r >= 0.0) || !(r < 1.0)) throw Error("per-link failure probability must lie in [0, 1)");
  FailureModel m;
  m.kind_ = Kind::PerLink;
  m.rhos_ = std::move(rhos);
  return m;
}

FailureModel FailureModel::from_instance(const CrossLayerInstance& inst) {
  return per_link(inst.physical().rhos());
}

double FailureModel::unified_rho() const {
  if (kind_ != Kind::Unified) throw Error("not a unified failure model");
  return rho_;
}

double FailureModel::rho_for(int edge_id) const {
  if (kind_ == Kind::Unified) return rho_;
  return rhos_.at(edge_id);
}

std::string FailureModel::descriptor() const {
  if (kind_ == Kind::PerLink) return "per-link";
  std::ostringstream os;
  os << "unified:" << rho_;
  return os.str();
}

double edge_weight(double rho) {
  if (!(rho >= 0.0) || !(rho < 1.0)) throw Error("failure probability must lie in [0, 1)");
  return -std::log1p(-rho);
}

double edge_weight(const PhysicalNetwork& phys, int edge_id, const FailureModel& model) {
  if (model.kind() == FailureModel::Kind::Unified) return 1.0;
  (void)phys;
  return edge_weight(model.rho_for(edge_id));
}

CrossLayerInstance apply_model(const CrossLayerInstance& inst, const FailureModel& model) {
  std::vector<double> rhos(inst.physical().edge_count());
  for (int e = 0; e < inst.physical().edge_count(); ++e) rhos[e] = model.rho_for(e);
  return CrossLayerInstance(PhysicalNetwork(inst.physical().graph(), std::move(rhos)),
                            inst.logical(), inst.node_map());
}

namespace {

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ParseError("unknown key \"" + it.key() + "\" in " + where);
  }
}

std::string id_from_json(const ordered_json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError("node id in " + where + " must be a string or integer");
}

struct ParsedLayer {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<double> rhos;
};

ParsedLayer parse_layer(const ordered_json& j, const std::string& name, bool with_rho) {
  if (!j.is_object()) throw ParseError("\"" + name + "\" must be an object");
  reject_unknown_keys(j, {"nodes", "edges"}, "\"" + name + "\"");
  if (!j.contains("nodes") || !j.contains("edges"))
    throw ParseError("\"" + name + "\" needs \"nodes\" and \"edges\"");
  if (!j["nodes"].is_array() || !j["edges"].is_array())
    throw ParseError("\"" + name + "\" nodes/edges must be arrays");

  ParsedLayer out;
  for (const auto& n : j["nodes"]) out.nodes.push_back(id_from_json(n, name + ".nodes"));
  {
    auto sorted = out.nodes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParseError("duplicate node id in \"" + name + "\"");
  }
  for (const auto& e : j["edges"]) {
    if (!e.is_object()) throw ParseError("edges of \"" + name + "\" must be objects");
    if (with_rho) {
      reject_unknown_keys(e, {"u", "v", "rho"}, "\"" + name + "\" edge");
      if (!e.contains("rho") || !e["rho"].is_number())
        throw ParseError("physical edge needs a numeric \"rho\"");
      double r = e["rho"].get<double>();
      if (!(r >= 0.0) || !(r < 1.0))
        throw ParseError("edge failure probability must lie in [0, 1)");
      out.rhos.push_back(r);
    } else {
      reject_unknown_keys(e, {"u", "v"}, "\"" + name + "\" edge");
    }
    if (!e.contains("u") || !e.contains("v"))
      throw ParseError("edge of \"" + name + "\" needs \"u\" and \"v\"");
    out.edges.emplace_back(id_from_json(e["u"], name + ".edges"),
                           id_from_json(e["v"], name + ".edges"));
  }
  return out;
}

}  // namespace

CrossLayerInstance parse_instance(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("instance is not valid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ParseError("instance must be a JSON object");
  reject_unknown_keys(j, {"physical", "logical", "node_map"}, "instance");
  for (const char* k : {"physical", "logical", "node_map"})
    if (!j.contains(k)) throw ParseError(std::string("instance needs \"") + k + "\"");

  ParsedLayer phys = parse_layer(j["physical"], "physical", true);
  ParsedLayer logi = parse_layer(j["logical"], "logical", false);

  if (!j["node_map"].is_object()) throw ParseError("\"node_map\" must be an object");
  std::map<std::string, std::string> raw;
  for (auto it = j["node_map"].begin(); it != j["node_map"].end(); ++it) {
    if (!raw.emplace(it.key(), id_from_json(it.value(), "node_map")).second)
      throw ParseError("duplicate node_map key: " + it.key());
  }

  // Edge order changes under canonicalization; re-associate the rho values.
  UndirectedGraph pg(phys.nodes, phys.edges);
  std::vector<double> rhos(pg.edge_count());
  std::vector<char> taken(pg.edge_count(), 0);
  for (size_t i = 0; i < phys.edges.size(); ++i) {
    int a = pg.index_of(phys.edges[i].first);
    int b = pg.index_of(phys.edges[i].second);
    Edge want = make_edge(a, b);
    bool placed = false;
    for (int e = 0; e < pg.edge_count() && !placed; ++e) {
      if (pg.edge(e) == want && !taken[e]) {
        rhos[e] = phys.rhos[i];
        taken[e] = 1;
        placed = true;
      }
    }
    if (!placed) throw ParseError("internal edge bookkeeping failure");
  }

  return CrossLayerInstance(PhysicalNetwork(std::move(pg), std::move(rhos)),
                            LogicalNetwork(UndirectedGraph(logi.nodes, logi.edges)),
                            NodeMapping(std::move(raw)));
}

std::string serialize_instance(const CrossLayerInstance& inst) {
  ordered_json j;
  {
    ordered_json nodes = ordered_json::array();
    for (const auto& id : inst.physical().graph().node_ids()) nodes.push_back(id);
    ordered_json edges = ordered_json::array();
    for (int e = 0; e < inst.physical().edge_count(); ++e) {
      const Edge& ed = inst.physical().graph().edge(e);
      edges.push_back({{"u", inst.physical().graph().node_id(ed.u)},
                       {"v", inst.physical().graph().node_id(ed.v)},
                       {"rho", inst.physical().rho(e)}});
    }
    j["physical"] = {{"nodes", nodes}, {"edges", edges}};
  }
  {
    ordered_json nodes = ordered_json::array();
    for (const auto& id : inst.logical().graph().node_ids()) nodes.push_back(id);
    ordered_json edges = ordered_json::array();
    for (int e = 0; e < inst.logical().edge_count(); ++e) {
      const Edge& ed = inst.logical().graph().edge(e);
      edges.push_back({{"u", inst.logical().graph().node_id(ed.u)},
                       {"v", inst.logical().graph().node_id(ed.v)}});
    }
    j["logical"] = {{"nodes", nodes}, {"edges", edges}};
  }
  {
    ordered_json map = ordered_json::object();
    for (const auto& [l, p] : inst.node_map().raw()) map[l] = p;   // std::map: sorted keys
    j["node_map"] = map;
  }
  return j.dump(2) + "\n";
}

CrossLayerInstance load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

}  // namespace xlayer
