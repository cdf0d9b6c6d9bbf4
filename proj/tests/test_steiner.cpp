#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_helpers.hpp"
#include "xlayer/steiner.hpp"

using namespace xlayer;

namespace {

UndirectedGraph complete(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("k" + std::to_string(i + 10));
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(ids[i], ids[j]);
  return UndirectedGraph(ids, edges);
}

bool is_tree_over(const UndirectedGraph& g, const SteinerTree& t,
                  const std::vector<int>& terminals) {
  // Connected, acyclic, and touching every terminal.
  std::set<int> nodes(t.nodes.begin(), t.nodes.end());
  for (int term : terminals)
    if (!nodes.count(term)) return false;
  if (t.edges.size() + 1 != nodes.size()) return false;
  std::vector<int> stack{t.nodes.front()};
  std::set<int> seen{t.nodes.front()};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : t.edges) {
      const Edge& ed = g.edge(e);
      int w = ed.u == v ? ed.v : ed.v == v ? ed.u : -1;
      if (w >= 0 && !seen.count(w)) {
        seen.insert(w);
        stack.push_back(w);
      }
    }
  }
  return seen.size() == nodes.size();
}

}  // namespace

TEST_CASE("exact Steiner tree matches the subset brute force") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    CrossLayerInstance inst = oracle::InstanceGen{2500 + i}.make(i);
    SteinerInstance si = steiner_instance_of(inst);
    std::vector<double> costs = si.costs;
    auto want = oracle::steiner_brute(si.graph.graph(), costs, si.terminals);
    REQUIRE(want.has_value());
    SteinerTree got = steiner_exact(si);
    CHECK(got.cost == doctest::Approx(want->cost).epsilon(1e-9));
    CHECK(is_tree_over(si.graph.graph(), got, si.terminals));
    // The reported cost must equal the sum over its own edges.
    double sum = 0.0;
    for (int e : got.edges) sum += costs[e];
    CHECK(got.cost == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("two terminals reduce to a shortest path; all nodes to an MST") {
  CrossLayerInstance inst = testutil::ring6();
  SteinerInstance si = steiner_instance_of(inst);
  const UndirectedGraph& g = si.graph.graph();

  SUBCASE("pair") {
    SteinerInstance pair = si;
    pair.terminals = {g.index_of("1"), g.index_of("2")};
    SteinerTree t = steiner_exact(pair);
    auto want = oracle::steiner_brute(g, si.costs, pair.terminals);
    CHECK(t.cost == doctest::Approx(want->cost).epsilon(1e-12));
  }
  SUBCASE("every node is a terminal") {
    SteinerInstance all = si;
    all.terminals.clear();
    for (int v = 0; v < g.node_count(); ++v) all.terminals.push_back(v);
    SteinerTree t = steiner_exact(all);
    CHECK(t.edges.size() == static_cast<std::size_t>(g.node_count() - 1));
    auto want = oracle::steiner_brute(g, si.costs, all.terminals);
    CHECK(t.cost == doctest::Approx(want->cost).epsilon(1e-12));
  }
}

TEST_CASE("approximation stays within twice the optimum and above it") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    CrossLayerInstance inst = oracle::InstanceGen{3100 + i}.make(i);
    SteinerInstance si = steiner_instance_of(inst);
    SteinerTree exact = steiner_exact(si);
    SteinerTree approx = steiner_2approx(si);
    CHECK(approx.cost >= exact.cost - 1e-12);
    CHECK(approx.cost <= 2.0 * exact.cost + 1e-12);
    CHECK(is_tree_over(si.graph.graph(), approx, si.terminals));
  }
}

TEST_CASE("best protecting tree equals the exhaustive tree/routing search") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    CrossLayerInstance inst = oracle::InstanceGen{4200 + i, 7, 4, 20000.0}.make(i);
    oracle::BestTreeOracle want = oracle::best_protecting_tree(inst);
    MaxProtectingTreeResult got = max_protecting_tree(inst);
    REQUIRE(got.exact);
    CHECK(got.prob == doctest::Approx(want.prob).epsilon(1e-9));
    CHECK(std::exp(-got.neg_log) == doctest::Approx(got.prob).epsilon(1e-12));
    CHECK(std::exp(-got.steiner.cost) == doctest::Approx(got.prob).epsilon(1e-12));
  }
}

TEST_CASE("ring fixture: best single tree reaches 0.5832") {
  CrossLayerInstance inst = testutil::ring6();
  MaxProtectingTreeResult r = max_protecting_tree(inst);
  REQUIRE(r.exact);
  CHECK(r.prob == doctest::Approx(0.5832).epsilon(1e-12));

  const UndirectedGraph& g = inst.physical().graph();
  auto pe = [&](const char* a, const char* b) {
    return g.find_edge(g.index_of(a), g.index_of(b)).value();
  };
  std::vector<int> want{pe("1", "4"), pe("2", "3"), pe("3", "6"), pe("4", "6")};
  std::sort(want.begin(), want.end());
  CHECK(r.steiner.edges == want);
  // The routed logical tree uses exactly the Steiner edges.
  std::set<int> used;
  for (int mu : r.tree.tau)
    for (int e : r.tree.routing.route(mu).edges) used.insert(e);
  CHECK(std::vector<int>(used.begin(), used.end()) == want);
}

TEST_CASE("disjoint Steiner tree pairs") {
  SUBCASE("the six-ring cannot host two disjoint trees") {
    CrossLayerInstance inst = testutil::ring6();
    SteinerInstance si = steiner_instance_of(inst);
    CHECK_FALSE(two_disjoint_steiner(si).has_value());
    CHECK_FALSE(augment_and_check(inst));
  }
  SUBCASE("a clique hosts a disjoint pair") {
    UndirectedGraph g = complete(6);
    PhysicalNetwork phys(g, std::vector<double>(g.edge_count(), 0.1));
    SteinerInstance si;
    si.graph = phys;
    si.terminals = {0, 1, 2, 3};
    si.costs.assign(g.edge_count(), edge_weight(0.1));
    auto pair = two_disjoint_steiner(si);
    REQUIRE(pair.has_value());
    CHECK(is_tree_over(g, pair->first, si.terminals));
    CHECK(is_tree_over(g, pair->second, si.terminals));
    std::set<int> first_edges(pair->first.edges.begin(), pair->first.edges.end());
    for (int e : pair->second.edges) CHECK_FALSE(first_edges.count(e));
  }
}

TEST_CASE("augmentation makes a well-connected overlay survivable") {
  // Logical triangle on three clique nodes: two edge-disjoint Steiner trees
  // exist, so duplicating each logical edge over the second tree survives
  // any single failure.
  UndirectedGraph g = complete(5);
  PhysicalNetwork phys(g, std::vector<double>(g.edge_count(), 0.1));
  LogicalNetwork logi(
      UndirectedGraph({"x", "y", "z"}, {{"x", "y"}, {"y", "z"}, {"x", "z"}}));
  CrossLayerInstance inst(
      phys, logi,
      NodeMapping({{"x", g.node_id(0)}, {"y", g.node_id(1)}, {"z", g.node_id(2)}}));
  CHECK(augment_and_check(inst));
}

TEST_CASE("edge connectivity agrees with the max-flow oracle") {
  SUBCASE("known values") {
    UndirectedGraph c4({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}});
    PhysicalNetwork cyc(c4, std::vector<double>(4, 0.1));
    CHECK(edge_connectivity(cyc, {0, 1, 2, 3}) == 2);
    UndirectedGraph k5 = complete(5);
    PhysicalNetwork clique(k5, std::vector<double>(k5.edge_count(), 0.1));
    std::vector<int> all{0, 1, 2, 3, 4};
    CHECK(edge_connectivity(clique, all) == 4);
  }
  SUBCASE("random graphs") {
    for (std::uint64_t i = 0; i < 15; ++i) {
      CrossLayerInstance inst = oracle::InstanceGen{5900 + i}.make(i);
      CHECK(edge_connectivity(inst.physical(), inst.terminal_nodes()) ==
            oracle::edge_connectivity(inst.physical().graph(), inst.terminal_nodes()));
    }
  }
}
