#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "test_helpers.hpp"
#include "xlayer/instance_gen.hpp"

using namespace xlayer;

namespace {

GenSpec spec_from(const std::string& text) { return parse_genspec(text); }

const char* kUnifiedSpec = R"({
  "seed": 11,
  "physical": "ring6",
  "node_fraction": 0.6,
  "avg_degree": 2.0,
  "probabilities": {"kind": "unified", "start": 10.0, "stop": 2.0, "step": 2.0}
})";

}  // namespace

TEST_CASE("bundled topologies") {
  auto ids = bundled_topology_ids();
  CHECK(std::find(ids.begin(), ids.end(), "ring6") != ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "nsf14") != ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "coronet75") != ids.end());

  PhysicalNetwork ring = bundled_topology("ring6");
  CHECK(ring.node_count() == 6);
  CHECK(ring.edge_count() == 6);
  CHECK(ring.graph().connected());

  PhysicalNetwork nsf = bundled_topology("nsf14");
  CHECK(nsf.node_count() == 14);
  CHECK(nsf.edge_count() == 21);
  CHECK(nsf.graph().connected());

  PhysicalNetwork cor = bundled_topology("coronet75", 0.05);
  CHECK(cor.node_count() == 75);
  CHECK(cor.edge_count() == 99);
  CHECK(cor.graph().connected());
  for (int e = 0; e < cor.edge_count(); ++e) CHECK(cor.rho(e) == 0.05);

  CHECK_THROWS_AS(bundled_topology("arpanet"), Error);
}

TEST_CASE("genspec parsing and validation") {
  GenSpec spec = spec_from(kUnifiedSpec);
  CHECK(spec.seed == 11);
  CHECK(spec.physical_source == "ring6");
  CHECK(spec.node_fraction == 0.6);
  CHECK(spec.prob.kind == ProbabilitySpec::Kind::UnifiedSweep);

  CHECK_THROWS_AS(spec_from("{}"), ParseError);
  CHECK_THROWS_AS(spec_from("[]"), ParseError);
  // Unknown key.
  CHECK_THROWS_AS(spec_from(R"({"seed":1,"physical":"ring6","node_fraction":0.5,
    "avg_degree":2,"probabilities":{"kind":"unified","start":5,"stop":1,"step":1},"x":0})"),
                  ParseError);
  // Fraction outside (0, 1].
  CHECK_THROWS_AS(spec_from(R"({"seed":1,"physical":"ring6","node_fraction":1.5,
    "avg_degree":2,"probabilities":{"kind":"unified","start":5,"stop":1,"step":1}})"),
                  ParseError);
  // Sweep running upward.
  CHECK_THROWS_AS(spec_from(R"({"seed":1,"physical":"ring6","node_fraction":0.5,
    "avg_degree":2,"probabilities":{"kind":"unified","start":1,"stop":5,"step":1}})"),
                  ParseError);
}

TEST_CASE("generation is deterministic and valid") {
  GenSpec spec = spec_from(kUnifiedSpec);
  CrossLayerInstance a = gen_instance(spec, spec.seed);
  CrossLayerInstance b = gen_instance(spec, spec.seed);
  CHECK(a == b);
  CHECK(serialize_instance(a) == serialize_instance(b));
  CHECK(validate_instance(a).empty());

  CrossLayerInstance c = gen_instance(spec, spec.seed + 1);
  CHECK(serialize_instance(c) != serialize_instance(a));

  // 60% of six nodes, rounded: four logical nodes on a spanning subtree.
  CHECK(a.logical().node_count() == 4);
  CHECK(a.logical().graph().connected());
}

TEST_CASE("logical sizes clamp to sane bounds") {
  GenSpec spec = spec_from(kUnifiedSpec);
  spec.node_fraction = 0.01;   // would round to zero nodes
  CrossLayerInstance tiny = gen_instance(spec, 3);
  CHECK(tiny.logical().node_count() == 2);
  CHECK(tiny.logical().edge_count() == 1);   // a two-node overlay is a single edge

  spec.node_fraction = 1.0;
  CrossLayerInstance full = gen_instance(spec, 3);
  CHECK(full.logical().node_count() == 6);
}

TEST_CASE("average degree drives extra edges or fails loudly") {
  GenSpec spec = spec_from(kUnifiedSpec);
  spec.node_fraction = 1.0;
  spec.avg_degree = 40.0;   // 6 logical nodes cannot average 40 edges
  CHECK_THROWS_AS(gen_instance(spec, 1), Error);
}

TEST_CASE("unified probability sweeps enumerate exact grid points") {
  GenSpec spec = spec_from(kUnifiedSpec);
  auto models = gen_probabilities(spec);
  REQUIRE(models.size() == 5);   // 10, 8, 6, 4, 2 percent
  std::vector<double> want{0.10, 0.08, 0.06, 0.04, 0.02};
  for (std::size_t i = 0; i < models.size(); ++i) {
    CHECK(models[i].kind() == FailureModel::Kind::Unified);
    CHECK(models[i].unified_rho() == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("normal probability sweeps resample into range") {
  GenSpec spec = spec_from(R"({
    "seed": 5,
    "physical": "nsf14",
    "node_fraction": 0.3,
    "avg_degree": 2.5,
    "probabilities": {"kind": "normal", "mean": 12.0, "variance": 4.0, "count": 6}
  })");
  auto models = gen_probabilities(spec);
  REQUIRE(models.size() == 6);
  PhysicalNetwork nsf = bundled_topology("nsf14");
  for (const FailureModel& m : models) {
    CHECK(m.kind() == FailureModel::Kind::PerLink);
    REQUIRE(m.per_link_rhos().size() == static_cast<std::size_t>(nsf.edge_count()));
    for (double rho : m.per_link_rhos()) {
      CHECK(rho >= 0.0);
      CHECK(rho < 1.0);
    }
  }
  // Means step downward across the sweep.
  auto mean_of = [](const FailureModel& m) {
    double s = 0.0;
    for (double rho : m.per_link_rhos()) s += rho;
    return s / static_cast<double>(m.per_link_rhos().size());
  };
  CHECK(mean_of(models[0]) > mean_of(models[models.size() - 1]));
  // Deterministic regeneration.
  auto again = gen_probabilities(spec);
  for (std::size_t i = 0; i < models.size(); ++i)
    CHECK(models[i].per_link_rhos() == again[i].per_link_rhos());
}

TEST_CASE("physical source can be an instance or bare network file") {
  GenSpec spec = spec_from(kUnifiedSpec);
  spec.physical_source = testutil::data_path("ring6.json");
  PhysicalNetwork net = resolve_physical(spec);
  CHECK(net.node_count() == 6);
  CHECK(net.rho(0) == 0.2);   // instance file keeps its per-link values
  CHECK_THROWS_AS(
      [&] {
        GenSpec bad = spec;
        bad.physical_source = "/nonexistent/net.json";
        resolve_physical(bad);
      }(),
      Error);
}
