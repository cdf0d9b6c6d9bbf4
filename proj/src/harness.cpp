#include <atomic>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "num_text.hpp"
#include "xlayer/harness.hpp"
#include "xlayer/tree_analysis.hpp"

namespace xlayer {

namespace {

using json = nlohmann::ordered_json;

constexpr double kProbTol = 1e-9;

// Route every logical edge along the unique tree path between its mapped
// endpoints; turns a Steiner tree into a whole-instance mapping whose
// critical set is contained in the tree's edges.
LinkMapping tree_lift_mapping(const CrossLayerInstance& inst, const SteinerTree& st) {
  const UndirectedGraph& g = inst.physical().graph();
  std::vector<char> alive(g.edge_count(), 0);
  for (int e : st.edges) alive[e] = 1;
  std::vector<PhysicalPath> routes;
  for (int mu = 0; mu < inst.logical().edge_count(); ++mu) {
    const Edge& le = inst.logical().graph().edge(mu);
    int s = inst.mapped_node(le.u);
    int t = inst.mapped_node(le.v);
    // BFS restricted to tree edges; the tree path is unique.
    std::vector<int> prev_node(g.node_count(), -1);
    prev_node[s] = s;
    std::deque<int> q{s};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      if (u == t) break;
      for (auto [v, e] : g.neighbors(u))
        if (alive[e] && prev_node[v] < 0) {
          prev_node[v] = u;
          q.push_back(v);
        }
    }
    if (prev_node[t] < 0) throw Error("Steiner tree does not span the mapped endpoints");
    std::vector<int> nodes;
    for (int u = t; u != s; u = prev_node[u]) nodes.push_back(u);
    nodes.push_back(s);
    std::reverse(nodes.begin(), nodes.end());
    routes.push_back(make_path(inst.physical(), std::move(nodes)));
  }
  return LinkMapping(std::move(routes));
}

json edge_pairs(const UndirectedGraph& g, const std::vector<int>& edge_ids) {
  json arr = json::array();
  for (int e : edge_ids) {
    const Edge& ed = g.edge(e);
    arr.push_back(json::array({g.node_id(ed.u), g.node_id(ed.v)}));
  }
  return arr;
}

}  // namespace

bool log_enabled() {
  const char* v = std::getenv("XLAYER_SURV_LOG");
  return v != nullptr && v[0] != '\0';
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "xlayer-surv: " << msg << "\n";
}

AnalysisResult analyze_instance(const CrossLayerInstance& inst, const AnalyzeOptions& opt) {
  inst.require_valid();
  PoolPolicy pool = opt.exhaustive ? PoolPolicy::all_simple()
                                   : opt.pool.value_or(PoolPolicy::default_for(inst));
  log_line("mapping search with pool " + pool.describe());
  AnalysisResult r;
  r.report = max_survivable_prob(inst, pool);
  r.max_tree = max_protecting_tree(inst);

  if (r.max_tree.prob > r.report.phi * (1.0 + kProbTol)) {
    // Only reachable under truncated pools: the searched space missed a
    // mapping at least as good as the Steiner tree routing, so build one.
    log_line("lifting the Steiner tree over the truncated search result");
    LinkMapping lifted = tree_lift_mapping(inst, r.max_tree.steiner);
    double lifted_prob = mapping_survivable_prob(inst, lifted);
    if (lifted_prob > r.report.phi) {
      r.report.phi = lifted_prob;
      r.report.neg_log_phi = mapping_neg_log_weight(inst, lifted);
      r.report.best_mapping = lifted;
      r.report.critical = critical_links(inst, lifted);
      r.report.base_set = base_set_extract(inst, lifted);
      if (r.report.k_min.has_value())
        r.report.k_min = static_cast<int>(r.report.critical.edges.size());
    }
  }

  r.survivable = r.report.critical.edges.empty();
  r.base_set_prob = tree_set_survivable_prob(inst.physical(), r.report.base_set);
  r.best_set_tree_prob = 0.0;
  for (const ProtectingTree& t : r.report.base_set.trees)
    r.best_set_tree_prob = std::max(r.best_set_tree_prob,
                                    tree_survivable_prob(inst.physical(), t));

  r.cross_check_ran = r.report.exhaustive && r.max_tree.exact;
  bool base_matches_phi = std::abs(r.base_set_prob - r.report.phi) <= kProbTol;
  if (r.cross_check_ran) {
    bool tree_below_phi = r.max_tree.prob <= r.report.phi * (1.0 + kProbTol);
    bool tree_is_max = r.best_set_tree_prob <= r.max_tree.prob * (1.0 + kProbTol);
    r.cross_check_ok = base_matches_phi && tree_below_phi && tree_is_max;
  } else {
    r.cross_check_ok = base_matches_phi;
  }
  return r;
}

std::string report_json(const CrossLayerInstance& inst, const AnalysisResult& r,
                        const std::string& instance_id) {
  const UndirectedGraph& gp = inst.physical().graph();
  const UndirectedGraph& gl = inst.logical().graph();
  json j;
  j["instance"] = instance_id;
  j["pool"] = {{"policy", r.report.pool_policy}, {"exhaustive", r.report.exhaustive}};
  j["phi"] = r.report.phi;
  j["neg_log_phi"] = r.report.neg_log_phi;
  j["survivable"] = r.survivable;
  if (r.report.k_min.has_value()) j["k_min"] = *r.report.k_min;
  else j["k_min"] = nullptr;
  j["critical"] = edge_pairs(gp, r.report.critical.edges);
  j["best_mapping"] = json::parse(serialize_mapping(inst, r.report.best_mapping));
  json base = json::array();
  for (const ProtectingTree& t : r.report.base_set.trees) {
    json tj;
    tj["tau"] = edge_pairs(gl, t.tau);
    json routes = json::array();
    for (int mu : t.tau) {
      const PhysicalPath& p = t.routing.route(mu);
      const Edge& le = gl.edge(mu);
      json path = json::array();
      for (int u : p.nodes) path.push_back(gp.node_id(u));
      routes.push_back({{"edge", json::array({gl.node_id(le.u), gl.node_id(le.v)})},
                        {"path", path}});
    }
    tj["routes"] = routes;
    tj["prob"] = tree_survivable_prob(inst.physical(), t);
    base.push_back(tj);
  }
  j["base_set"] = base;
  j["base_set_prob"] = r.base_set_prob;
  json mt;
  mt["prob"] = r.max_tree.prob;
  mt["neg_log"] = r.max_tree.neg_log;
  mt["exact"] = r.max_tree.exact;
  mt["steiner_edges"] = edge_pairs(gp, r.max_tree.steiner.edges);
  mt["tau"] = edge_pairs(gl, r.max_tree.tree.tau);
  j["max_tree"] = mt;
  j["cross_check"] = {{"ran", r.cross_check_ran}, {"ok", r.cross_check_ok},
                      {"best_set_tree_prob", r.best_set_tree_prob}};
  j["search"] = {{"mappings_considered", r.report.mappings_considered},
                 {"nodes", r.report.search_nodes}};
  return j.dump(2) + "\n";
}

namespace {

std::string model_label(const GenSpec& spec, int model_idx, const FailureModel& model) {
  if (model.kind() == FailureModel::Kind::Unified) return model.descriptor();
  double mean_pct = spec.prob.mean - model_idx * (spec.prob.mean / spec.prob.count);
  std::ostringstream os;
  os << "normal:" << mean_pct / 100.0;
  return os.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::vector<SweepRow> run_sweep(const GenSpec& spec, const SweepOptions& opt) {
  if (opt.instances < 1) throw Error("sweep needs at least one instance");
  PhysicalNetwork phys = resolve_physical(spec);
  std::vector<FailureModel> models = gen_probabilities(spec);

  std::vector<CrossLayerInstance> insts;
  std::vector<std::string> ids;
  for (int k = 0; k < opt.instances; ++k) {
    std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(k);
    GeneratedLogical gl = gen_logical(spec, phys, seed);
    insts.emplace_back(phys, std::move(gl.logical), std::move(gl.node_map));
    insts.back().require_valid();
    ids.push_back("g" + std::to_string(seed));
  }

  int total = opt.instances * static_cast<int>(models.size());
  std::vector<SweepRow> rows(total);
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= total) return;
      int ik = t / static_cast<int>(models.size());
      int mk = t % static_cast<int>(models.size());
      SweepRow& row = rows[t];
      row.instance_id = ids[ik];
      row.model = model_label(spec, mk, models[mk]);
      auto t0 = std::chrono::steady_clock::now();
      try {
        CrossLayerInstance modeled = apply_model(insts[ik], models[mk]);
        AnalyzeOptions aopt;
        aopt.pool = opt.pool;
        AnalysisResult a = analyze_instance(modeled, aopt);
        row.max_tree_prob = a.max_tree.prob;
        row.base_set_prob = a.report.phi;
        row.ratio = a.max_tree.prob / a.report.phi;
        row.survivable = a.survivable;
        row.k_min = a.report.k_min;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      if (opt.timings) {
        auto dt = std::chrono::steady_clock::now() - t0;
        row.wall_ms =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(dt).count();
      }
      log_line("row " + row.instance_id + " " + row.model + " done");
    }
  };

  int threads = std::max(1, std::min(opt.parallel, total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "# xlayer-surv sweep v1\n";
  out += "instance,model,max_tree_prob,base_set_prob,ratio,survivable,k_min,wall_ms,error\n";
  for (const SweepRow& r : rows) {
    out += csv_escape(r.instance_id) + "," + csv_escape(r.model) + ",";
    if (r.error.empty()) {
      out += format_double(r.max_tree_prob) + "," + format_double(r.base_set_prob) + "," +
             format_double(r.ratio) + "," + (r.survivable ? "1" : "0") + ",";
      out += r.k_min.has_value() ? std::to_string(*r.k_min) : std::string();
      out += "," + format_double(r.wall_ms) + ",";
    } else {
      out += ",,,,," + format_double(r.wall_ms) + "," + csv_escape(r.error);
    }
    out += "\n";
  }
  return out;
}

}  // namespace xlayer
