#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rng.hpp"
#include "xlayer/instance_gen.hpp"

namespace xlayer {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + " is missing \"" + key + "\"");
  return *it;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ParseError(where + " has unknown key \"" + it.key() + "\"");
  }
}

double need_number(const json& j, const char* key, const std::string& where) {
  const json& v = need(j, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + " must be a number");
  return v.get<double>();
}

}  // namespace

GenSpec parse_genspec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("genspec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("genspec must be a JSON object");
  reject_unknown(j, {"seed", "physical", "node_fraction", "avg_degree", "probabilities"},
                 "genspec");
  GenSpec spec;
  const json& seed = need(j, "seed", "genspec");
  if (!seed.is_number_unsigned()) throw ParseError("genspec.seed must be a nonnegative integer");
  spec.seed = seed.get<std::uint64_t>();
  const json& phys = need(j, "physical", "genspec");
  if (!phys.is_string()) throw ParseError("genspec.physical must be a string");
  spec.physical_source = phys.get<std::string>();
  spec.node_fraction = need_number(j, "node_fraction", "genspec");
  if (!(spec.node_fraction > 0.0 && spec.node_fraction <= 1.0))
    throw ParseError("genspec.node_fraction must be in (0, 1]");
  spec.avg_degree = need_number(j, "avg_degree", "genspec");
  if (!(spec.avg_degree > 0.0)) throw ParseError("genspec.avg_degree must be positive");

  const json& pj = need(j, "probabilities", "genspec");
  if (!pj.is_object()) throw ParseError("genspec.probabilities must be an object");
  const json& kind = need(pj, "kind", "genspec.probabilities");
  if (kind == "unified") {
    reject_unknown(pj, {"kind", "start", "stop", "step"}, "genspec.probabilities");
    spec.prob.kind = ProbabilitySpec::Kind::UnifiedSweep;
    spec.prob.start = need_number(pj, "start", "genspec.probabilities");
    spec.prob.stop = need_number(pj, "stop", "genspec.probabilities");
    spec.prob.step = need_number(pj, "step", "genspec.probabilities");
    if (!(spec.prob.step > 0.0)) throw ParseError("unified sweep step must be positive");
    if (!(spec.prob.stop > 0.0)) throw ParseError("unified sweep stop must be positive");
    if (spec.prob.start < spec.prob.stop)
      throw ParseError("unified sweep start must be >= stop");
    if (spec.prob.start >= 100.0)
      throw ParseError("unified sweep start must stay below 100 percent");
  } else if (kind == "normal") {
    reject_unknown(pj, {"kind", "mean", "variance", "count"}, "genspec.probabilities");
    spec.prob.kind = ProbabilitySpec::Kind::NormalSweep;
    spec.prob.mean = need_number(pj, "mean", "genspec.probabilities");
    spec.prob.variance = need_number(pj, "variance", "genspec.probabilities");
    const json& cnt = need(pj, "count", "genspec.probabilities");
    if (!cnt.is_number_integer() || cnt.get<long long>() < 1)
      throw ParseError("normal sweep count must be a positive integer");
    spec.prob.count = cnt.get<int>();
    if (spec.prob.variance < 0.0) throw ParseError("normal sweep variance must be >= 0");
    if (!(spec.prob.mean > 0.0 && spec.prob.mean < 100.0))
      throw ParseError("normal sweep mean must be in (0, 100) percent");
  } else {
    throw ParseError("genspec.probabilities.kind must be \"unified\" or \"normal\"");
  }
  return spec;
}

GenSpec load_genspec_file(const std::string& path) { return parse_genspec(read_file(path)); }

namespace {

PhysicalNetwork make_topology(const std::vector<std::string>& nodes,
                              const std::vector<std::pair<std::string, std::string>>& edges,
                              double rho) {
  UndirectedGraph g(nodes, edges);
  return PhysicalNetwork(g, std::vector<double>(g.edge_count(), rho));
}

std::vector<std::string> number_ids(int n) {
  std::vector<std::string> ids;
  int width = static_cast<int>(std::to_string(n).size());
  for (int i = 1; i <= n; ++i) {
    std::string s = std::to_string(i);
    ids.push_back(std::string(width - s.size(), '0') + s);
  }
  return ids;
}

PhysicalNetwork ring6(double rho) {
  // 6-node ring in the arrangement the worked fixture uses.
  return make_topology({"1", "2", "3", "4", "5", "6"},
                       {{"1", "4"}, {"4", "6"}, {"6", "3"}, {"3", "2"}, {"2", "5"}, {"5", "1"}},
                       rho);
}

PhysicalNetwork nsf14(double rho) {
  // NSFNET-style 14-node / 21-link backbone (reconstruction from the usual
  // published drawings).
  std::vector<std::pair<int, int>> e = {{1, 2},  {1, 3},   {1, 8},   {2, 3},  {2, 4},
                                        {3, 6},  {4, 5},   {4, 11},  {5, 6},  {5, 7},
                                        {6, 10}, {6, 14},  {7, 8},   {8, 9},  {9, 10},
                                        {9, 12}, {10, 13}, {11, 12}, {11, 14}, {12, 13},
                                        {13, 14}};
  std::vector<std::pair<std::string, std::string>> edges;
  for (auto [u, v] : e) edges.push_back({std::to_string(u), std::to_string(v)});
  std::vector<std::string> nodes;
  for (int i = 1; i <= 14; ++i) nodes.push_back(std::to_string(i));
  return make_topology(nodes, edges, rho);
}

PhysicalNetwork coronet75(double rho) {
  // Synthetic continental-scale stand-in: a 75-node ring with 24 long chords
  // (99 links), not a map of any real deployment.
  std::vector<std::string> nodes = number_ids(75);
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < 75; ++i) edges.push_back({nodes[i], nodes[(i + 1) % 75]});
  for (int k = 0; k < 24; ++k) {
    int u = (k * 3) % 75;
    int v = (k * 3 + 37) % 75;
    edges.push_back({nodes[u], nodes[v]});
  }
  return make_topology(nodes, edges, rho);
}

PhysicalNetwork parse_physical_json(const json& pj, const std::string& where) {
  if (!pj.is_object()) throw ParseError(where + " must be a JSON object");
  reject_unknown(pj, {"nodes", "edges"}, where);
  const json& nj = need(pj, "nodes", where);
  if (!nj.is_array() || nj.empty()) throw ParseError(where + ".nodes must be a non-empty array");
  std::vector<std::string> nodes;
  for (const json& n : nj) {
    if (n.is_string()) nodes.push_back(n.get<std::string>());
    else if (n.is_number_integer()) nodes.push_back(std::to_string(n.get<long long>()));
    else throw ParseError(where + ".nodes entries must be strings or integers");
  }
  const json& ej = need(pj, "edges", where);
  if (!ej.is_array()) throw ParseError(where + ".edges must be an array");
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::pair<std::pair<std::string, std::string>, double>> with_rho;
  auto id_of = [&](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw ParseError(where + ".edges endpoints must be strings or integers");
  };
  for (const json& e : ej) {
    if (!e.is_object()) throw ParseError(where + ".edges entries must be objects");
    reject_unknown(e, {"u", "v", "rho"}, where + ".edges[]");
    std::string u = id_of(need(e, "u", where + ".edges[]"));
    std::string v = id_of(need(e, "v", where + ".edges[]"));
    double rho = need_number(e, "rho", where + ".edges[]");
    if (!(rho >= 0.0 && rho < 1.0)) throw ParseError(where + " rho must be in [0, 1)");
    edges.push_back({u, v});
    with_rho.push_back({{u, v}, rho});
  }
  UndirectedGraph g(nodes, edges);
  // re-associate rho values with the canonical edge order
  std::vector<double> rhos(g.edge_count(), -1.0);
  for (const auto& [uv, rho] : with_rho) {
    int a = g.index_of(uv.first), b = g.index_of(uv.second);
    auto eid = g.find_edge(a, b);
    if (!eid) throw ParseError(where + " edge lookup failed");   // unreachable
    rhos[*eid] = rho;
  }
  return PhysicalNetwork(g, rhos);
}

}  // namespace

std::vector<std::string> bundled_topology_ids() { return {"coronet75", "nsf14", "ring6"}; }

PhysicalNetwork bundled_topology(const std::string& id, double default_rho) {
  if (id == "ring6") return ring6(default_rho);
  if (id == "nsf14") return nsf14(default_rho);
  if (id == "coronet75") return coronet75(default_rho);
  throw Error("unknown bundled topology: " + id);
}

PhysicalNetwork resolve_physical(const GenSpec& spec) {
  for (const std::string& id : bundled_topology_ids())
    if (id == spec.physical_source) return bundled_topology(id);
  std::string text = read_file(spec.physical_source);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(spec.physical_source + " is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("physical")) return parse_instance(text).physical();
  return parse_physical_json(j, spec.physical_source);
}

GeneratedLogical gen_logical(const GenSpec& spec, const PhysicalNetwork& phys,
                             std::uint64_t seed) {
  int np = phys.node_count();
  if (np < 2) throw Error("physical network too small to sample logical nodes from");
  int nl = static_cast<int>(std::llround(spec.node_fraction * np));
  nl = std::max(2, std::min(nl, np));

  Rng rng(mix_seed(seed, 0x10c1ca1));

  // sample the physical images (shuffled order doubles as the random mapping)
  std::vector<int> phys_nodes(np);
  for (int i = 0; i < np; ++i) phys_nodes[i] = i;
  rng.shuffle(phys_nodes);
  phys_nodes.resize(nl);

  std::vector<std::string> lids = number_ids(nl);
  for (std::string& id : lids) id = "l" + id;

  // random recursive tree, then Erdos-Renyi extras over the complement
  std::vector<std::pair<int, int>> chosen;
  for (int i = 1; i < nl; ++i) {
    int j = rng.index(i);
    chosen.push_back({std::min(i, j), std::max(i, j)});
  }
  std::vector<std::pair<int, int>> candidates;
  for (int i = 0; i < nl; ++i)
    for (int j = i + 1; j < nl; ++j)
      if (std::find(chosen.begin(), chosen.end(), std::make_pair(i, j)) == chosen.end())
        candidates.push_back({i, j});
  double target_edges = spec.avg_degree * nl / 2.0;
  double extra = target_edges - (nl - 1);
  if (!candidates.empty()) {
    double p = extra / static_cast<double>(candidates.size());
    if (p > 1.0 + 1e-9)
      throw Error("average degree target " + std::to_string(spec.avg_degree) +
                  " is infeasible for " + std::to_string(nl) + " logical nodes");
    p = std::max(0.0, std::min(1.0, p));
    for (auto [i, j] : candidates)
      if (rng.chance(p)) chosen.push_back({i, j});
  }

  std::vector<std::pair<std::string, std::string>> edges;
  for (auto [i, j] : chosen) edges.push_back({lids[i], lids[j]});
  LogicalNetwork logical(UndirectedGraph(lids, edges));

  std::map<std::string, std::string> raw;
  for (int i = 0; i < nl; ++i) raw[lids[i]] = phys.graph().node_id(phys_nodes[i]);
  return {std::move(logical), NodeMapping(std::move(raw))};
}

GeneratedLogical gen_logical(const GenSpec& spec, std::uint64_t seed) {
  return gen_logical(spec, resolve_physical(spec), seed);
}

CrossLayerInstance gen_instance(const GenSpec& spec, std::uint64_t seed) {
  PhysicalNetwork phys = resolve_physical(spec);
  GeneratedLogical gl = gen_logical(spec, phys, seed);
  CrossLayerInstance inst(std::move(phys), std::move(gl.logical), std::move(gl.node_map));
  inst.require_valid();
  return inst;
}

std::vector<FailureModel> gen_probabilities(const GenSpec& spec) {
  std::vector<FailureModel> out;
  if (spec.prob.kind == ProbabilitySpec::Kind::UnifiedSweep) {
    int n = static_cast<int>(std::llround((spec.prob.start - spec.prob.stop) / spec.prob.step)) + 1;
    for (int i = 0; i < n; ++i) {
      double pct = spec.prob.start - i * spec.prob.step;
      out.push_back(FailureModel::unified(pct / 100.0));
    }
    return out;
  }
  PhysicalNetwork phys = resolve_physical(spec);
  double sigma = std::sqrt(spec.prob.variance);
  double mean_step = spec.prob.mean / spec.prob.count;
  for (int i = 0; i < spec.prob.count; ++i) {
    double mean_pct = spec.prob.mean - i * mean_step;
    Rng rng(mix_seed(spec.seed, 0xd0d0 + static_cast<std::uint64_t>(i)));
    std::vector<double> rhos(phys.edge_count());
    for (int e = 0; e < phys.edge_count(); ++e) {
      double draw;
      int guard = 0;
      do {
        draw = rng.normal(mean_pct, sigma);
        if (++guard > 100000)
          throw Error("normal sweep keeps drawing outside [0, 100) percent; check mean/variance");
      } while (draw < 0.0 || draw >= 100.0);
      rhos[e] = draw / 100.0;
    }
    out.push_back(FailureModel::per_link(std::move(rhos)));
  }
  return out;
}

}  // namespace xlayer
