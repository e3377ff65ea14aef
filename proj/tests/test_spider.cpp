#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <set>
#include <string>

#include "doctest.h"
#include "spiderlab/spider.hpp"
#include "spiderlab/substrate.hpp"

using namespace spiderlab;

namespace {

Substrate unit_line() {
  GenParams gp;
  return generate(Family::Line, gp);
}

}  // namespace

TEST_CASE("bounded-span admissibility: distinct legs, span cap, sorting") {
  Substrate line = unit_line();
  ConfigRule rule = ConfigRule::bounded_span(2, 3, true);
  CHECK(rule.admissible({"0", "1"}, line));
  CHECK(rule.admissible({"0", "3"}, line));
  CHECK_FALSE(rule.admissible({"0", "4"}, line));
  CHECK_FALSE(rule.admissible({"2", "2"}, line));
  CHECK(rule.canonicalize({"10", "9"}, line) == Config{"9", "10"});
  // Numeric, not lexicographic, ordering on integer substrates.
  CHECK(rule.canonicalize({"10", "2"}, line) == Config{"2", "10"});
}

TEST_CASE("local configurations at a site: three shapes for k=2, s=3") {
  Substrate line = unit_line();
  ConfigRule rule = ConfigRule::bounded_span(2, 3, true);
  std::set<std::string> at_zero;
  for (int d = -3; d <= 3; ++d) {
    if (d == 0) continue;
    Config c{"0", std::to_string(d)};
    if (rule.admissible(c, line))
      at_zero.insert(config_address(rule.canonicalize(c, line)));
  }
  // Up to the unordered-leg convention there are three shapes per offset sign,
  // six configurations with a leg at 0 in total.
  CHECK(at_zero.size() == 6);
  CHECK(at_zero.count("0|1") == 1);
  CHECK(at_zero.count("0|3") == 1);
  CHECK(at_zero.count("-3|0") == 1);
}

TEST_CASE("spider substrate suppresses blocked moves instead of looping") {
  GenParams gp;
  gp.p = 0.7;
  gp.q = 0.3;
  Substrate line = generate(Family::Line, gp);
  Substrate configs =
      spider_substrate(line, ConfigRule::bounded_span(2, 2, true));
  std::map<VertexId, double> fwd;
  for (const auto& e : configs.neighbors("0|1")) fwd[e.to] = e.forward;
  // Collisions (leg onto leg) are suppressed; only two moves survive.
  REQUIRE(fwd.size() == 2);
  CHECK(fwd.at("-1|1") == doctest::Approx(0.3));
  CHECK(fwd.at("0|2") == doctest::Approx(0.7));
  // From the stretched shape only the two contracting moves survive s = 2.
  CHECK(configs.neighbors("0|2").size() == 2);
  // Mean leg height.
  CHECK(configs.height_of("3|5") == doctest::Approx(4.0));
}

TEST_CASE("stretched-line identification round-trips") {
  for (long long z = 0; z <= 14; ++z) {
    Config c = stretched_line_config(z);
    CHECK(stretched_line_index(c) == z);
  }
  CHECK(stretched_line_index({"3", "4"}) == 6);
  CHECK(stretched_line_index({"3", "5"}) == 7);
}

TEST_CASE("explicit offset tables restrict the admissible shapes") {
  Substrate line = unit_line();
  ConfigRule rule = ConfigRule::explicit_table(2, {{0, 1}, {0, 2}});
  CHECK(rule.admissible({"4", "5"}, line));
  CHECK(rule.admissible({"4", "6"}, line));
  CHECK_FALSE(rule.admissible({"4", "7"}, line));
  CHECK_FALSE(rule.admissible({"5", "4"}, line));  // offsets are ordered
  SpiderNetwork spn =
      build_spider_network(line, rule, {"0", "1"}, 6);
  // Every enumerated config matches one of the two offset rows.
  for (const auto& v : spn.net.vertices) {
    Config legs = parse_config(v);
    long long d = std::stoll(legs[1]) - std::stoll(legs[0]);
    CHECK((d == 1 || d == 2));
  }
}

TEST_CASE("irreducibility: frozen at span 1, connected at span 3") {
  Substrate line = unit_line();
  SpiderNetwork frozen = build_spider_network(
      line, ConfigRule::bounded_span(2, 1, true), {"0", "1"}, 6);
  IrreducibilityReport r1 = check_irreducible(frozen);
  CHECK_FALSE(r1.irreducible);
  CHECK(r1.witness_a != r1.witness_b);

  SpiderNetwork open = build_spider_network(
      line, ConfigRule::bounded_span(2, 3, true), {"0", "1"}, 8);
  CHECK(check_irreducible(open).irreducible);

  GenParams tg;
  tg.M = 3;
  tg.a = 0.5;
  Substrate tree = generate(Family::TreeWithEnd, tg);
  SpiderNetwork tspn = build_spider_network(
      tree, ConfigRule::bounded_span(2, 2, true), lined_start(tree, 2), 4);
  CHECK(check_irreducible(tspn).irreducible);
}

TEST_CASE("ordered legs on the plain line cannot swap") {
  Substrate line = unit_line();
  SpiderNetwork spn = build_spider_network(
      line, ConfigRule::bounded_span(2, 3, false), {"0", "1"}, 6);
  CHECK(spn.net.contains("0|1"));
  CHECK(spn.net.contains("1|0"));
  CHECK_FALSE(check_irreducible(spn).irreducible);
  CHECK_FALSE(distance(spn.net, "0|1", "1|0").has_value());
}

TEST_CASE("boundary flags leave interior neighborhoods untruncated") {
  Substrate line = unit_line();
  const int radius = 6, s = 2;
  SpiderNetwork spn = build_spider_network(
      line, ConfigRule::bounded_span(2, s, true), {"0", "1"}, radius);
  for (int i = 0; i < spn.net.size(); ++i) {
    Config legs = parse_config(spn.net.vertices[i]);
    int depth = 0;
    for (const auto& leg : legs)
      depth = std::max(depth, (int)std::llabs(std::stoll(leg)));
    CHECK((depth >= radius - s) == (bool)spn.net.boundary[i]);
    if (!spn.net.boundary[i]) {
      // All lazy-oracle neighbors of an interior config are in the network.
      for (const auto& e : spn.configs.neighbors(spn.net.vertices[i]))
        CHECK(spn.net.contains(e.to));
    }
  }
}

TEST_CASE("global position picks the leg closest to the root") {
  Substrate line = unit_line();
  FiniteNetwork ball = materialize_ball(line, "0", 8);
  CHECK(global_position({"-1", "2"}, ball) == "-1");
  CHECK(global_position({"2", "4"}, ball) == "2");
  // Ties go to the earlier entry of the supplied enumeration.
  std::vector<VertexId> enumeration{"0", "1", "-1", "2", "-2"};
  CHECK(global_position({"-1", "1"}, ball, enumeration) == "1");
}

TEST_CASE("midpoint height of two-leg tree configurations") {
  GenParams gp;
  gp.M = 3;
  gp.a = 0.5;
  Substrate tree = generate(Family::TreeWithEnd, gp);
  CHECK(midpoint_height({"0:", "0:00"}, tree) == doctest::Approx(1.0));
  CHECK(midpoint_height({"0:0", "0:1"}, tree) == doctest::Approx(0.0));
  CHECK(midpoint_height({"0:", "0:0"}, tree) == doctest::Approx(0.5));
}

TEST_CASE("config diameter agrees with brute-force pairwise distances") {
  Substrate line = unit_line();
  SpiderNetwork spn = build_spider_network(
      line, ConfigRule::bounded_span(2, 2, true), {"0", "1"}, 8);
  ConfigDiameterReport rep = config_diameter(spn, "0");
  std::vector<VertexId> at_site;
  for (const auto& v : spn.net.vertices)
    for (const auto& leg : parse_config(v))
      if (leg == "0") at_site.push_back(v);
  CHECK((std::size_t)rep.config_count == at_site.size());
  int brute = 0;
  for (const auto& a : at_site)
    for (const auto& b : at_site) {
      auto d = distance(spn.net, a, b);
      REQUIRE(d.has_value());
      brute = std::max(brute, *d);
    }
  CHECK(rep.diameter == brute);
  CHECK_FALSE(rep.truncated);
}

TEST_CASE("lined start grows a path configuration from the root") {
  Substrate line = unit_line();
  Config c = lined_start(line, 3);
  REQUIRE(c.size() == 3);
  for (std::size_t i = 1; i < c.size(); ++i)
    CHECK(line.dist_between(c[i - 1], c[i]) == 1);

  GenParams tg;
  tg.M = 3;
  Substrate tree = generate(Family::RootedTree, tg);
  Config t = lined_start(tree, 3);
  CHECK(t[0] == "o");
  CHECK(tree.dist_between(t[0], t[2]) == 2);
}

TEST_CASE("config addresses round-trip") {
  Config c{"0:01", "1:2"};
  CHECK(parse_config(config_address(c)) == c);
  CHECK(config_address(c) == "0:01|1:2");
}
