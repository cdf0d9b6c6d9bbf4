#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_helpers.hpp"
#include "xlayer/milp.hpp"
#include "xlayer/steiner.hpp"
#include "xlayer/surv_engine.hpp"

using namespace xlayer;

#ifndef XLAYER_GOLDEN_DIR
#define XLAYER_GOLDEN_DIR "tests/golden"
#endif

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_row(MilpModel& m, const std::string& name, std::vector<LinTerm> terms,
             ConstraintSense sense, double rhs) {
  MilpConstraint c;
  c.name = name;
  c.terms = std::move(terms);
  c.sense = sense;
  c.rhs = rhs;
  m.constraints.push_back(std::move(c));
}

// Residual check: every constraint of m holds at the given point.
double worst_violation(const MilpModel& m, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : m.constraints) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coef * x[t.var];
    double v = 0.0;
    if (row.sense == ConstraintSense::LE) v = lhs - row.rhs;
    if (row.sense == ConstraintSense::GE) v = row.rhs - lhs;
    if (row.sense == ConstraintSense::EQ) v = std::fabs(lhs - row.rhs);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

TEST_CASE("model shapes on the six-ring") {
  CrossLayerInstance inst = testutil::ring6();
  FailureModel fm = FailureModel::from_instance(inst);

  MilpModel mt = build_max_tree_model(inst, fm);
  CHECK(mt.name == "max_tree");
  CHECK(mt.vars.size() == 66);          // 6 x + 48 y + 4 z + 8 f
  CHECK(mt.constraints.size() == 61);   // 24 route + 24 use + 4 treeflow + 8 treecap + 1 size
  CHECK(mt.sense == ObjectiveSense::Minimize);

  MilpModel bs = build_base_set_model(inst, fm);
  CHECK(bs.name == "base_set");
  CHECK(bs.vars.size() == 102);         // 48 y + 48 w + 6 g
  CHECK(bs.constraints.size() == 96);   // 24 route + 48 avail + 24 failflow

  MilpModel st = build_surtest_model(inst);
  CHECK(st.name == "surtest");
  CHECK(st.vars.size() == 96);          // base set without the g column
  CHECK(st.constraints.size() == 96);

  for (const MilpModel* m : {&mt, &bs, &st}) CHECK_NOTHROW(m->validate());
}

TEST_CASE("unified failure models count links in the objective") {
  CrossLayerInstance inst = testutil::ring6();
  MilpModel mt = build_max_tree_model(inst, FailureModel::unified(0.1));
  for (std::size_t v = 0; v < mt.vars.size(); ++v)
    if (mt.vars[v].name[0] == 'x') CHECK(mt.objective[v] == 1.0);
  SolveResult r = solve_tiny(mt);
  REQUIRE(r.status == SolveResult::Status::Optimal);
  CHECK(r.objective == 4.0);   // the cheapest protecting tree spans 4 links
}

TEST_CASE("LP and MPS writers round-trip byte-stably") {
  CrossLayerInstance inst = testutil::ring6();
  FailureModel fm = FailureModel::from_instance(inst);
  for (const MilpModel& m :
       {build_max_tree_model(inst, fm), build_base_set_model(inst, fm),
        build_surtest_model(inst)}) {
    for (ModelFormat fmt : {ModelFormat::Lp, ModelFormat::Mps}) {
      std::string text = write_model(m, fmt);
      MilpModel back = parse_model(text, fmt);
      CHECK(back == m);
      CHECK(write_model(back, fmt) == text);
    }
  }
}

TEST_CASE("format tags") {
  CHECK(model_format_of("lp") == ModelFormat::Lp);
  CHECK(model_format_of("mps") == ModelFormat::Mps);
  CHECK_THROWS_AS(model_format_of("sav"), Error);
  CHECK_THROWS_AS(parse_model("gibberish", ModelFormat::Lp), ParseError);
  CHECK_THROWS_AS(parse_model("gibberish", ModelFormat::Mps), ParseError);
}

TEST_CASE("golden model exports stay fixed") {
  CrossLayerInstance inst = testutil::ring6();
  MilpModel bs = build_base_set_model(inst, FailureModel::from_instance(inst));
  CHECK(write_model(bs, ModelFormat::Lp) == slurp(std::string(XLAYER_GOLDEN_DIR) + "/six_ring_base_set.lp"));
  CHECK(write_model(bs, ModelFormat::Mps) == slurp(std::string(XLAYER_GOLDEN_DIR) + "/six_ring_base_set.mps"));
}

TEST_CASE("tiny solver on hand-built models") {
  SUBCASE("pick the heavier item") {
    MilpModel m;
    m.name = "knap";
    m.add_var("a", VarKind::Binary, 0, 1, -1.0);
    m.add_var("b", VarKind::Binary, 0, 1, -2.0);
    add_row(m, "cap", {{0, 1.0}, {1, 1.0}}, ConstraintSense::LE, 1.0);
    SolveResult r = solve_tiny(m);
    REQUIRE(r.status == SolveResult::Status::Optimal);
    CHECK(r.objective == -2.0);
    CHECK(r.assignment[0] == 0.0);
    CHECK(r.assignment[1] == 1.0);
  }
  SUBCASE("maximize flips the sense") {
    MilpModel m;
    m.name = "maxi";
    m.sense = ObjectiveSense::Maximize;
    m.add_var("a", VarKind::Binary, 0, 1, 3.0);
    m.add_var("b", VarKind::Binary, 0, 1, 2.0);
    add_row(m, "cap", {{0, 1.0}, {1, 1.0}}, ConstraintSense::LE, 1.0);
    SolveResult r = solve_tiny(m);
    REQUIRE(r.status == SolveResult::Status::Optimal);
    CHECK(r.objective == 3.0);
  }
  SUBCASE("infeasible rows are detected") {
    MilpModel m;
    m.name = "none";
    m.add_var("a", VarKind::Binary, 0, 1, 1.0);
    add_row(m, "impossible", {{0, 1.0}}, ConstraintSense::GE, 2.0);
    SolveResult r = solve_tiny(m);
    CHECK(r.status == SolveResult::Status::Infeasible);
    CHECK_FALSE(r.has_incumbent);
  }
  SUBCASE("equality forcing") {
    MilpModel m;
    m.name = "force";
    m.add_var("a", VarKind::Binary, 0, 1, 5.0);
    m.add_var("b", VarKind::Binary, 0, 1, 1.0);
    add_row(m, "pick_both", {{0, 1.0}, {1, 1.0}}, ConstraintSense::EQ, 2.0);
    SolveResult r = solve_tiny(m);
    REQUIRE(r.status == SolveResult::Status::Optimal);
    CHECK(r.objective == 6.0);
  }
}

TEST_CASE("tiny solver matches exhaustive search on random binary programs") {
  std::uint64_t state = 0x5eed;
  auto next = [&state]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state >> 33;
  };
  for (int round = 0; round < 60; ++round) {
    MilpModel m;
    m.name = "rand";
    int n = 4 + static_cast<int>(next() % 9);   // 4..12 vars
    for (int v = 0; v < n; ++v) {
      double coef = static_cast<double>(static_cast<int>(next() % 21) - 10);
      m.add_var("v" + std::to_string(v), VarKind::Binary, 0, 1, coef);
    }
    if (next() % 2) m.sense = ObjectiveSense::Maximize;
    int rows = 1 + static_cast<int>(next() % 5);
    for (int r = 0; r < rows; ++r) {
      std::vector<LinTerm> terms;
      for (int v = 0; v < n; ++v)
        if (next() % 3 == 0)
          terms.push_back({v, static_cast<double>(static_cast<int>(next() % 11) - 5)});
      if (terms.empty()) terms.push_back({static_cast<int>(next() % n), 1.0});
      double rhs = static_cast<double>(static_cast<int>(next() % 9) - 2);
      ConstraintSense s = r % 3 == 0   ? ConstraintSense::LE
                          : r % 3 == 1 ? ConstraintSense::GE
                                       : ConstraintSense::EQ;
      add_row(m, "r" + std::to_string(r), std::move(terms), s, rhs);
    }
    oracle::MilpBrute want = oracle::milp_brute(m);
    SolveResult got = solve_tiny(m);
    if (want.feasible) {
      REQUIRE(got.status == SolveResult::Status::Optimal);
      CHECK(got.objective == doctest::Approx(want.objective).epsilon(1e-9));
      CHECK(worst_violation(m, got.assignment) < 1e-9);
    } else {
      CHECK(got.status == SolveResult::Status::Infeasible);
    }
  }
}

TEST_CASE("solver guardrails") {
  SUBCASE("too many binaries") {
    MilpModel m;
    m.name = "big";
    for (int v = 0; v < 200; ++v) m.add_var("v" + std::to_string(v), VarKind::Binary, 0, 1, 1.0);
    add_row(m, "r", {{0, 1.0}}, ConstraintSense::LE, 1.0);
    CHECK_THROWS_AS(solve_tiny(m), Error);
  }
  SUBCASE("continuous objective is out of scope") {
    MilpModel m;
    m.name = "cont";
    m.add_var("a", VarKind::Binary, 0, 1, 1.0);
    m.add_var("w", VarKind::Continuous, 0, 1, 1.0);
    add_row(m, "r", {{0, 1.0}, {1, 1.0}}, ConstraintSense::EQ, 1.0);
    CHECK_THROWS_AS(solve_tiny(m), Error);
  }
  SUBCASE("node limit reports LimitExceeded") {
    MilpModel m;
    m.name = "limited";
    for (int v = 0; v < 12; ++v)
      m.add_var("v" + std::to_string(v), VarKind::Binary, 0, 1, v % 2 ? 1.0 : -1.0);
    std::vector<LinTerm> all;
    for (int v = 0; v < 12; ++v) all.push_back({v, 1.0});
    add_row(m, "half", std::move(all), ConstraintSense::EQ, 6.0);
    SolveLimits limits;
    limits.max_nodes = 3;
    SolveResult r = solve_tiny(m, limits);
    CHECK(r.status == SolveResult::Status::LimitExceeded);
  }
}

TEST_CASE("formulation optima match the combinatorial engine on the six-ring") {
  CrossLayerInstance inst = testutil::ring6();
  FailureModel fm = FailureModel::from_instance(inst);

  SurvivabilityReport rep = max_survivable_prob(inst);
  MilpModel bs = build_base_set_model(inst, fm);
  SolveResult base = solve_tiny(bs);
  REQUIRE(base.status == SolveResult::Status::Optimal);
  CHECK(std::exp(-base.objective) == doctest::Approx(rep.phi).epsilon(1e-9));
  CHECK(std::exp(-base.objective) == doctest::Approx(0.81).epsilon(1e-9));
  CHECK(worst_violation(bs, base.assignment) < 1e-6);

  MaxProtectingTreeResult tree = max_protecting_tree(inst);
  SolveResult mt = solve_tiny(build_max_tree_model(inst, fm));
  REQUIRE(mt.status == SolveResult::Status::Optimal);
  CHECK(std::exp(-mt.objective) == doctest::Approx(tree.prob).epsilon(1e-9));
  CHECK(std::exp(-mt.objective) == doctest::Approx(0.5832).epsilon(1e-9));

  // The six-ring is not survivable, so the feasibility probe must fail.
  SolveResult st = solve_tiny(build_surtest_model(inst));
  CHECK(st.status == SolveResult::Status::Infeasible);
}
