#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "test_helpers.hpp"
#include "xlayer/routing.hpp"

using namespace xlayer;

TEST_CASE("pool policy parsing") {
  CHECK(PoolPolicy::parse("all").kind == PoolPolicy::Kind::AllSimple);
  CHECK(PoolPolicy::parse("k-shortest:5").k == 5);
  CHECK(PoolPolicy::parse("hops:3").hop_bound == 3);
  CHECK_THROWS_AS(PoolPolicy::parse("fastest"), Error);
  CHECK_THROWS_AS(PoolPolicy::parse("k-shortest:0"), Error);
  CHECK(PoolPolicy::all_simple().describe() == "all");
  CHECK(PoolPolicy::k_shortest(7).describe() == "k-shortest:7");
  CHECK(PoolPolicy::hop_bounded(2).describe() == "hops:2");
  CHECK(PoolPolicy::all_simple().exhaustive());
  CHECK_FALSE(PoolPolicy::k_shortest(3).exhaustive());
}

TEST_CASE("candidate enumeration matches the brute-force path oracle") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    CrossLayerInstance inst = oracle::InstanceGen{900 + i}.make(i);
    const UndirectedGraph& pg = inst.physical().graph();
    for (int mu = 0; mu < inst.logical().edge_count(); ++mu) {
      auto got = candidate_paths(inst, mu, PoolPolicy::all_simple());
      Edge e = inst.logical().graph().edge(mu);
      auto want = oracle::all_simple_paths(pg, inst.mapped_node(e.u), inst.mapped_node(e.v));
      REQUIRE(got.size() == want.size());
      // Same set of node sequences (library order is cost-based).
      std::set<std::vector<int>> seen;
      for (const auto& p : got) seen.insert(p.nodes);
      std::set<std::vector<int>> expect;
      for (auto nodes : want) {
        if (pg.node_id(nodes.back()) < pg.node_id(nodes.front()))
          std::reverse(nodes.begin(), nodes.end());
        expect.insert(nodes);
      }
      CHECK(seen == expect);
    }
  }
}

TEST_CASE("pools are ordered by cost, then length, then node sequence") {
  CrossLayerInstance inst = testutil::ring6();
  for (int mu = 0; mu < inst.logical().edge_count(); ++mu) {
    auto pool = candidate_paths(inst, mu, PoolPolicy::all_simple());
    for (std::size_t i = 1; i < pool.size(); ++i) {
      double wa = path_weight(inst.physical(), pool[i - 1]);
      double wb = path_weight(inst.physical(), pool[i]);
      CHECK(wa <= wb + 1e-12);
      if (std::abs(wa - wb) < 1e-12)
        CHECK(pool[i - 1].nodes.size() <= pool[i].nodes.size());
    }
  }
}

TEST_CASE("k-shortest is a prefix of the full ordering; hop bound filters") {
  CrossLayerInstance inst = testutil::ring6();
  for (int mu = 0; mu < inst.logical().edge_count(); ++mu) {
    auto all = candidate_paths(inst, mu, PoolPolicy::all_simple());
    auto k2 = candidate_paths(inst, mu, PoolPolicy::k_shortest(2));
    REQUIRE(k2.size() == std::min<std::size_t>(2, all.size()));
    for (std::size_t i = 0; i < k2.size(); ++i) CHECK(k2[i] == all[i]);

    auto short_ones = candidate_paths(inst, mu, PoolPolicy::hop_bounded(3));
    for (const auto& p : short_ones) CHECK(p.edges.size() <= 3);
    std::size_t expect = 0;
    for (const auto& p : all)
      if (p.edges.size() <= 3) ++expect;
    CHECK(short_ones.size() == expect);
  }
}

TEST_CASE("default pool policy keys off the physical size") {
  CrossLayerInstance small = testutil::ring6();
  CHECK(PoolPolicy::default_for(small).kind == PoolPolicy::Kind::AllSimple);
}

TEST_CASE("make_path validates adjacency") {
  CrossLayerInstance inst = testutil::ring6();
  const PhysicalNetwork& phys = inst.physical();
  const UndirectedGraph& g = phys.graph();
  PhysicalPath p = make_path(phys, {g.index_of("1"), g.index_of("4"), g.index_of("6")});
  CHECK(p.edges.size() == 2);
  CHECK_THROWS_AS(make_path(phys, {g.index_of("1"), g.index_of("6")}), Error);
  CHECK(path_weight(phys, p) ==
        doctest::Approx(edge_weight(0.2) + edge_weight(0.1)).epsilon(1e-15));
}

TEST_CASE("mapping JSON round-trip and validation") {
  CrossLayerInstance inst = testutil::ring6();
  // Route every logical edge somehow (first pool entry).
  std::vector<PhysicalPath> routes;
  for (int mu = 0; mu < inst.logical().edge_count(); ++mu)
    routes.push_back(candidate_paths(inst, mu, PoolPolicy::all_simple()).front());
  LinkMapping m(routes);
  CHECK(m.total());
  CHECK(validate_mapping(inst, m).empty());

  std::string text = serialize_mapping(inst, m);
  LinkMapping back = parse_mapping(inst, text);
  CHECK(back == m);

  // Swapping two routes breaks endpoint agreement.
  std::vector<PhysicalPath> wrong = routes;
  std::swap(wrong[0], wrong[1]);
  CHECK_FALSE(validate_mapping(inst, LinkMapping(wrong)).empty());
}

TEST_CASE("co-mapping is the complement of the used edges") {
  CrossLayerInstance inst = testutil::ring6();
  std::vector<PhysicalPath> routes;
  for (int mu = 0; mu < inst.logical().edge_count(); ++mu)
    routes.push_back(candidate_paths(inst, mu, PoolPolicy::all_simple()).front());
  LinkMapping m(routes);

  std::vector<int> tau{0, 1, 2};
  auto co = co_mapping(tau, m, inst.physical());
  std::set<int> used;
  for (int mu : tau)
    for (int e : m.route(mu).edges) used.insert(e);
  for (int e = 0; e < inst.physical().edge_count(); ++e) {
    bool in_co = std::find(co.begin(), co.end(), e) != co.end();
    CHECK(in_co == !used.count(e));
  }
}

TEST_CASE("disconnected endpoints yield an error, not an empty pool") {
  UndirectedGraph pg({"a", "b", "c", "d"}, {{"a", "b"}, {"c", "d"}});
  PhysicalNetwork phys(pg, {0.1, 0.1});
  LogicalNetwork logi(UndirectedGraph({"a", "c"}, {{"a", "c"}}));
  CrossLayerInstance inst(phys, logi, NodeMapping({{"a", "a"}, {"c", "c"}}));
  CHECK_THROWS_AS(candidate_paths(inst, 0, PoolPolicy::all_simple()), Error);
}
