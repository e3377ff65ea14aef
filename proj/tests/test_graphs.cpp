#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <queue>
#include <set>
#include <string>

#include "doctest.h"
#include "spiderlab/network.hpp"
#include "spiderlab/substrate.hpp"

using namespace spiderlab;

namespace {

// Independent ball oracle: plain BFS over the neighbor oracle, no shared
// code with materialize_ball.
std::set<VertexId> bfs_ball(const Substrate& sub, const VertexId& center,
                            int radius) {
  std::set<VertexId> seen{center};
  std::queue<std::pair<VertexId, int>> q;
  q.push({center, 0});
  while (!q.empty()) {
    auto [v, d] = q.front();
    q.pop();
    if (d == radius) continue;
    for (const auto& e : sub.neighbors(v))
      if (seen.insert(e.to).second) q.push({e.to, d + 1});
  }
  return seen;
}

}  // namespace

TEST_CASE("biased line: rates, height, distance") {
  GenParams gp;
  gp.p = 0.7;
  gp.q = 0.3;
  Substrate line = generate(Family::Line, gp);
  auto nb = line.neighbors("5");
  REQUIRE(nb.size() == 2);
  std::map<VertexId, double> fwd;
  for (const auto& e : nb) fwd[e.to] = e.forward;
  CHECK(fwd.at("6") == doctest::Approx(0.7));
  CHECK(fwd.at("4") == doctest::Approx(0.3));
  CHECK(line.height_of("-3") == -3.0);
  CHECK(line.dist_between("-2", "5") == 7);
}

TEST_CASE("ball sizes and boundary flags match an independent BFS oracle") {
  GenParams gp;
  Substrate line = generate(Family::Line, gp);
  FiniteNetwork ball = materialize_ball(line, "0", 3);
  CHECK(ball.size() == 7);
  int boundary_count = 0;
  for (int i = 0; i < ball.size(); ++i) boundary_count += ball.boundary[i];
  CHECK(boundary_count == 2);

  GenParams tg;
  tg.M = 3;
  Substrate tree = generate(Family::RootedTree, tg);
  CHECK(materialize_ball(tree, "o", 1).size() == 4);
  CHECK(materialize_ball(tree, "o", 2).size() == 10);

  GenParams wg;
  wg.M = 3;
  wg.a = 0.4;
  Substrate wend = generate(Family::TreeWithEnd, wg);
  for (int r : {1, 2, 3}) {
    FiniteNetwork b = materialize_ball(wend, wend.root, r);
    std::set<VertexId> oracle = bfs_ball(wend, wend.root, r);
    CHECK((std::size_t)b.size() == oracle.size());
    for (const auto& v : b.vertices) CHECK(oracle.count(v) == 1);
  }
}

TEST_CASE("balls are monotone: a smaller ball is the induced subgraph") {
  GenParams gp;
  gp.M = 3;
  Substrate tree = generate(Family::RootedTree, gp);
  FiniteNetwork small = materialize_ball(tree, "o", 3);
  FiniteNetwork big = materialize_ball(tree, "o", 4);
  for (int i = 0; i < small.size(); ++i) {
    const VertexId& v = small.vertices[i];
    REQUIRE(big.contains(v));
    for (const auto& [j, qij] : small.adj[i]) {
      double q_big = big.rate(big.id_of(v), big.id_of(small.vertices[j]));
      CHECK(q_big == qij);
    }
  }
}

TEST_CASE("network edge support is symmetric and JSON round-trips") {
  GenParams gp;
  gp.p = 0.6;
  gp.q = 0.4;
  Substrate line = generate(Family::Line, gp);
  FiniteNetwork net = materialize_ball(line, "0", 4);
  for (int i = 0; i < net.size(); ++i)
    for (const auto& [j, qij] : net.adj[i]) {
      CHECK(qij > 0.0);
      CHECK(net.rate(j, i) > 0.0);
    }
  FiniteNetwork back = FiniteNetwork::from_json(net.to_json());
  REQUIRE(back.size() == net.size());
  CHECK(back.vertices == net.vertices);
  CHECK(back.boundary == net.boundary);
  CHECK(back.root == net.root);
  for (int i = 0; i < net.size(); ++i)
    for (const auto& [j, qij] : net.adj[i])
      CHECK(back.rate(back.id_of(net.vertices[i]),
                      back.id_of(net.vertices[j])) == qij);
}

TEST_CASE("tree with an end: addresses, heights, father/son rates") {
  GenParams gp;
  gp.M = 3;
  gp.a = 0.25;
  Substrate tree = generate(Family::TreeWithEnd, gp);
  CHECK(tree.root == "0:");
  CHECK(tree.height_of("0:") == 0.0);
  CHECK(tree.height_of("2:") == -2.0);
  CHECK(tree.height_of("0:10") == 2.0);

  // Every vertex has exactly one father (height -1) and M-1 sons (height +1).
  for (const VertexId& v : {VertexId("0:"), VertexId("1:"), VertexId("0:01")}) {
    int fathers = 0, sons = 0;
    double h = tree.height_of(v);
    for (const auto& e : tree.neighbors(v)) {
      if (tree.height_of(e.to) == h - 1) {
        ++fathers;
        CHECK(e.forward == doctest::Approx(1.0 - gp.a));
      } else {
        ++sons;
        CHECK(e.forward == doctest::Approx(gp.a / (gp.M - 1)));
      }
    }
    CHECK(fathers == 1);
    CHECK(sons == gp.M - 1);
  }

  CHECK(tree.dist_between("0:", "0:00") == 2);
  CHECK(tree.dist_between("0:0", "0:1") == 2);
  CHECK(tree.dist_between("2:", "0:") == 2);
  CHECK(tree.dist_between("0:01", "1:1") == 4);

  TreeAddress a = TreeAddress::parse("3:12");
  CHECK(a.u == 3);
  CHECK(a.w == "12");
  CHECK(a.print() == "3:12");
  CHECK_THROWS_AS(TreeAddress::parse("2:0"), ParameterError);
}

TEST_CASE("decorated line: pendants at powers of two") {
  Substrate dec = generate(Family::DecoratedLine, {});
  CHECK(dec.neighbors("8").size() == 3);   // left, right, pendant
  CHECK(dec.neighbors("12").size() == 2);  // no pendant off powers of two
  auto pn = dec.neighbors("8#");
  REQUIRE(pn.size() == 1);
  CHECK(pn[0].to == "8");
  CHECK(dec.dist_between("4#", "8#") == 6);
  CHECK(dec.dist_between("4", "8#") == 5);
}

TEST_CASE("product of a 3-cycle and the line") {
  Substrate prod = generate(Family::ProductZ3Z, {});
  auto nb = prod.neighbors("1,4");
  REQUIRE(nb.size() == 4);
  CHECK(prod.dist_between("0,0", "2,3") == 4);
  CHECK(prod.dist_between("1,2", "1,-2") == 4);
  CHECK(prod.height_of("2,-7") == -7.0);
}

TEST_CASE("star of segments: hub rates and tip loop weight") {
  GenParams gp;
  gp.p = 0.6;
  gp.q = 0.4;
  gp.segments = {3, 5};
  Substrate star = generate(Family::StarOfSegments, gp);
  CHECK(star.neighbors("0").size() == 2);
  CHECK(star.loop_of("3:3") > 0.0);   // segment tip keeps a self-loop weight
  CHECK(star.loop_of("3:1") == 0.0);
  CHECK(star.dist_between("3:2", "5:1") == 3);
}

TEST_CASE("parameter validation fails loudly") {
  GenParams bad;
  bad.p = 0.0;
  CHECK_THROWS_AS(generate(Family::Line, bad), ParameterError);
  GenParams m2;
  m2.M = 2;
  CHECK_THROWS_AS(generate(Family::RootedTree, m2), ParameterError);
  GenParams a0;
  a0.a = 1.5;
  CHECK_THROWS_AS(generate(Family::TreeWithEnd, a0), ParameterError);
  CHECK_THROWS_AS(generate(Family::LampertiHalfline, GenParams{}),
                  ParameterError);
  CHECK_THROWS_AS(family_from_string("no_such_family"), ParameterError);
}

TEST_CASE("size caps are enforced") {
  GenParams gp;
  gp.M = 3;
  Substrate tree = generate(Family::RootedTree, gp);
  Limits tight;
  tight.vertex_cap = 5;
  CHECK_THROWS_AS(materialize_ball(tree, "o", 3, tight), SizeError);
}
