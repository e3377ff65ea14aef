#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "spiderlab/scenario.hpp"

using namespace spiderlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kValidScenario = R"({
  "schema_version": 1,
  "name": "line_demo",
  "substrate": {"family": "line", "p": 0.7, "q": 0.3},
  "rule": {"kind": "bounded_span", "k": 2, "s": 3, "leftmost_first": true},
  "seed": 20260823,
  "analyses": [
    {"type": "build", "radius": 6},
    {"type": "speed-exact", "partition": "span"},
    {"type": "speed-mc", "n_jumps": 5000, "replicas": 4},
    {"type": "simulate", "n_jumps": 2000},
    {"type": "lumpability", "partition": "span", "radius": 8}
  ]
})";

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("spiderlab_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("a valid scenario parses and records its pieces") {
  Scenario sc = Scenario::from_json(kValidScenario);
  CHECK(sc.name == "line_demo");
  CHECK(sc.family == Family::Line);
  CHECK(sc.has_rule);
  CHECK(sc.rule.k == 2);
  CHECK(sc.rule.s == 3);
  CHECK(sc.has_seed);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 1, "typo_key": true,
    "substrate": {"family": "line"},
    "analyses": [{"type": "build"}]
  })"),
                  ParameterError);
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 1,
    "substrate": {"family": "line", "pp": 0.7},
    "analyses": [{"type": "build"}]
  })"),
                  ParameterError);
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 1,
    "substrate": {"family": "line"},
    "analyses": [{"type": "build", "radius": 4, "extra": 1}]
  })"),
                  ParameterError);
}

TEST_CASE("schema violations fail with clear validation errors") {
  // Wrong schema version.
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 2,
    "substrate": {"family": "line"},
    "analyses": [{"type": "build"}]
  })"),
                  ParameterError);
  // Stochastic analysis without a seed.
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 1,
    "substrate": {"family": "line"},
    "rule": {"kind": "bounded_span", "k": 2, "s": 2},
    "analyses": [{"type": "speed-mc"}]
  })"),
                  ParameterError);
  // Unknown family and unknown analysis type.
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 1,
    "substrate": {"family": "moebius"},
    "analyses": [{"type": "build"}]
  })"),
                  ParameterError);
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 1,
    "substrate": {"family": "line"},
    "analyses": [{"type": "frobnicate"}]
  })"),
                  ParameterError);
  // Out-of-range substrate parameters surface during validation.
  CHECK_THROWS_AS(Scenario::from_json(R"({
    "schema_version": 1,
    "substrate": {"family": "tree_with_end", "M": 3, "a": 2.0},
    "analyses": [{"type": "build"}]
  })"),
                  ParameterError);
  CHECK_THROWS_AS(Scenario::from_json("{ not json"), ParameterError);
}

TEST_CASE("scenario runs write artifacts and are byte-reproducible") {
  Scenario sc = Scenario::from_json(kValidScenario);
  TempDir d1("run1"), d2("run2");
  run_scenario(sc, d1.path.string());
  run_scenario(sc, d2.path.string());

  std::vector<std::string> expected{
      "line_demo_network.json", "line_demo_factor.json",
      "line_demo_speed_exact.csv", "line_demo_speed_mc.csv",
      "line_demo_trace.csv", "line_demo_lumpability.txt"};
  for (const auto& name : expected) {
    CAPTURE(name);
    REQUIRE(std::filesystem::exists(d1.path / name));
    CHECK(slurp(d1.path / name) == slurp(d2.path / name));
  }
  // CSV contract: header row, LF endings, no CR.
  std::string csv = slurp(d1.path / "line_demo_speed_mc.csv");
  CHECK(csv.rfind("label,estimate,stderr,replicas,n_jumps,seed\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  std::string lump = slurp(d1.path / "line_demo_lumpability.txt");
  CHECK(lump.rfind("lumpable", 0) == 0);
}

TEST_CASE("different seeds change the stochastic artifacts") {
  Scenario a = Scenario::from_json(kValidScenario);
  std::string other(kValidScenario);
  other.replace(other.find("20260823"), 8, "20260824");
  Scenario b = Scenario::from_json(other);
  TempDir d1("seed1"), d2("seed2");
  run_scenario(a, d1.path.string());
  run_scenario(b, d2.path.string());
  CHECK(slurp(d1.path / "line_demo_trace.csv") !=
        slurp(d2.path / "line_demo_trace.csv"));
  // Deterministic artifacts stay identical.
  CHECK(slurp(d1.path / "line_demo_factor.json") ==
        slurp(d2.path / "line_demo_factor.json"));
}

TEST_CASE("every advertised preset exists and runs") {
  auto presets = list_presets();
  REQUIRE(presets.size() == 6);
  for (const auto& p : presets) {
    CHECK(!p.description.empty());
    CHECK(!p.expected_runtime.empty());
  }
  CHECK_THROWS_AS(run_preset("no-such-preset", 1, "/tmp"), ParameterError);

  // Smoke-run the cheapest preset end to end.
  TempDir d("preset");
  run_preset("distortion-decorated-line", 1, d.path.string());
  std::string csv = slurp(d.path / "distortion_decorated_line_table.csv");
  CHECK(csv.rfind("site,config_diameter,truncated\n", 0) == 0);
}

TEST_CASE("hitting analysis resolves targets on the ball") {
  Scenario sc = Scenario::from_json(R"({
    "schema_version": 1,
    "name": "hit_demo",
    "substrate": {"family": "line", "p": 0.4, "q": 0.6},
    "start": ["3"],
    "analyses": [
      {"type": "hitting", "targets": ["0"], "from": "3", "radius": 12}
    ]
  })");
  TempDir d("hit");
  run_scenario(sc, d.path.string());
  std::string csv = slurp(d.path / "hit_demo_hitting.csv");
  CHECK(csv.find("from,expected_steps,expected_time,residual") == 0);
  CHECK(csv.find("\n3,") != std::string::npos);
}
