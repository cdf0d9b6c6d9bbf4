#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <sys/wait.h>

#include "test_helpers.hpp"

#ifndef XLAYER_CLI_PATH
#define XLAYER_CLI_PATH "./xlayer-surv"
#endif
#ifndef XLAYER_GOLDEN_DIR
#define XLAYER_GOLDEN_DIR "tests/golden"
#endif

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(XLAYER_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string ring6_path() { return testutil::data_path("ring6.json"); }

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path =
      (std::filesystem::temp_directory_path() / ("xlayer_cli_" + name)).string();
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

const char* kSurvivableInstance = R"({
  "physical": {
    "nodes": ["a", "b", "c", "d", "e"],
    "edges": [
      {"u": "a", "v": "b", "rho": 0.1}, {"u": "b", "v": "c", "rho": 0.1},
      {"u": "c", "v": "d", "rho": 0.1}, {"u": "d", "v": "e", "rho": 0.1},
      {"u": "e", "v": "a", "rho": 0.1}
    ]
  },
  "logical": {
    "nodes": ["a", "b", "c", "d", "e"],
    "edges": [
      {"u": "a", "v": "b"}, {"u": "b", "v": "c"}, {"u": "c", "v": "d"},
      {"u": "d", "v": "e"}, {"u": "e", "v": "a"}
    ]
  },
  "node_map": {"a": "a", "b": "b", "c": "c", "d": "d", "e": "e"}
})";

}  // namespace

TEST_CASE("check reports survivability through the exit code") {
  RunResult no = run("check " + ring6_path());
  CHECK(no.code == 10);
  nlohmann::json j = nlohmann::json::parse(no.out);
  CHECK(j["survivable"] == false);
  CHECK(j["exhaustive"] == true);
  CHECK(j["witness"].is_null());

  std::string path = write_temp("cycle.json", kSurvivableInstance);
  RunResult yes = run("check " + path);
  CHECK(yes.code == 0);
  nlohmann::json k = nlohmann::json::parse(yes.out);
  CHECK(k["survivable"] == true);
  CHECK(k["witness"].is_object());
}

TEST_CASE("check cross-validates against the feasibility probe") {
  RunResult r = run("check " + ring6_path() + " --cross-check");
  CHECK(r.code == 10);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["cross_check"]["decided"] == true);
  CHECK(j["cross_check"]["feasible"] == false);
}

TEST_CASE("analyze writes a full report") {
  RunResult r = run("analyze " + ring6_path() + " --exhaustive");
  CHECK(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["phi"].get<double>() == doctest::Approx(0.81).epsilon(1e-9));
  CHECK(j["instance"] == "ring6");

  std::string report_path =
      (std::filesystem::temp_directory_path() / "xlayer_cli_report.json").string();
  RunResult to_file = run("analyze " + ring6_path() + " --exhaustive -o " + report_path);
  CHECK(to_file.code == 0);
  std::ifstream in(report_path);
  REQUIRE(in.good());
  nlohmann::json k = nlohmann::json::parse(in);
  CHECK(k["phi"] == j["phi"]);
}

TEST_CASE("export emits the golden formulation") {
  RunResult lp = run("export " + ring6_path() + " --formulation base-set --format lp");
  CHECK(lp.code == 0);
  std::ifstream golden(std::string(XLAYER_GOLDEN_DIR) + "/six_ring_base_set.lp",
                       std::ios::binary);
  REQUIRE(golden.good());
  std::string want((std::istreambuf_iterator<char>(golden)), std::istreambuf_iterator<char>());
  CHECK(lp.out == want);

  RunResult mps = run("export " + ring6_path() + " --formulation max-tree --format mps");
  CHECK(mps.code == 0);
  CHECK(mps.out.find("OBJSENSE") != std::string::npos);
  CHECK(mps.out.find("ENDATA") != std::string::npos);
}

TEST_CASE("seeded outputs on the bundled reconstructions stay fixed") {
  auto golden = [](const std::string& name) {
    std::ifstream in(std::string(XLAYER_GOLDEN_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };

  RunResult sweep = run("sweep " + testutil::data_path("genspecs/nsf14_normal.json") +
                        " --instances 2 --parallel 4");
  CHECK(sweep.code == 0);
  CHECK(sweep.out == golden("nsf14_normal_sweep.csv"));

  RunResult gen = run("gen " + testutil::data_path("genspecs/coronet75_unified.json"));
  CHECK(gen.code == 0);
  CHECK(gen.out == golden("coronet75_gen.json"));
}

TEST_CASE("gen produces deterministic instances") {
  std::string spec = write_temp("spec.json", R"({
    "seed": 3,
    "physical": "ring6",
    "node_fraction": 0.6,
    "avg_degree": 2.0,
    "probabilities": {"kind": "unified", "start": 10.0, "stop": 2.0, "step": 2.0}
  })");
  RunResult a = run("gen " + spec);
  RunResult b = run("gen " + spec);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  RunResult c = run("gen " + spec + " --seed 9");
  CHECK(c.code == 0);
  CHECK(c.out != a.out);

  // Generated instances parse and analyze.
  std::string inst = write_temp("gen.json", a.out);
  CHECK(run("analyze " + inst).code == 0);
}

TEST_CASE("sweep prints CSV rows") {
  std::string spec = write_temp("sweep_spec.json", R"({
    "seed": 7,
    "physical": "ring6",
    "node_fraction": 0.6,
    "avg_degree": 2.0,
    "probabilities": {"kind": "unified", "start": 10.0, "stop": 6.0, "step": 2.0}
  })");
  RunResult r = run("sweep " + spec + " --instances 2 --parallel 2");
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 22) == "# xlayer-surv sweep v1");
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines == 8);   // comment + header + 2x3 rows

  RunResult serial = run("sweep " + spec + " --instances 2");
  CHECK(serial.out == r.out);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("frobnicate").code == 2);
  CHECK(run("check").code == 2);                       // missing path
  CHECK(run("check /no/such/file.json").code == 2);    // unreadable input
  CHECK(run("export " + ring6_path()).code == 2);      // missing formulation
  CHECK(run("export " + ring6_path() + " --formulation nonsense").code == 2);
  CHECK(run("").code == 2);                            // subcommand required
}

TEST_CASE("malformed instances exit with 2") {
  std::string path = write_temp("bad.json", "{\"physical\": 3}");
  CHECK(run("check " + path).code == 2);
  CHECK(run("analyze " + path).code == 2);
}
