#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spiderlab/network.hpp"

namespace spiderlab {

struct NeighborEdge {
  VertexId to;
  double forward;   // q(x, to)
  double backward;  // q(to, x)
};

// Lazy graph generator: neighbor oracle plus optional exact helpers.
// Oracles are pure functions of the address, so substrates are safe to
// share across threads.
struct Substrate {
  std::string family;
  VertexId root;
  std::function<std::vector<NeighborEdge>(const VertexId&)> neighbors;
  std::function<double(const VertexId&)> height;        // optional
  std::function<long long(const VertexId&, const VertexId&)> dist;  // optional
  std::function<double(const VertexId&)> loop_rate;     // optional
  bool is_tree = false;
  bool integer_addresses = false;  // addresses totally ordered as integers
  int degree_cap = 64;

  double height_of(const VertexId& v) const;
  long long dist_between(const VertexId& x, const VertexId& y) const;
  double loop_of(const VertexId& v) const { return loop_rate ? loop_rate(v) : 0.0; }
};

enum class Family {
  Line,
  LampertiHalfline,
  RootedTree,
  TreeWithEnd,
  ProductZ3Z,
  DecoratedLine,
  StarOfSegments,
};

Family family_from_string(const std::string& name);
std::string family_to_string(Family f);

struct GenParams {
  double p = 0.5;
  double q = 0.5;
  int M = 3;
  double a = 0.5;
  bool unit_rates = false;  // tree_with_end: rate 1 on every edge (SRW)
  int n_max = 8;
  std::vector<int> segments;  // star: explicit segment lengths (default 1..n_max)
  std::function<double(long long)> up_rate;  // lamperti: q(x, x+1)
};

Substrate generate(Family family, const GenParams& params);

// BFS ball of the given radius around `center`. Vertices at exactly the
// radius are boundary-flagged; edges are copied from the oracle.
FiniteNetwork materialize_ball(const Substrate& sub, const VertexId& center,
                               int radius, const Limits& limits = {});

// Tree-with-end address helpers (u father-steps above the origin, then a
// descent word over {0..M-2}; first letter != 0 when u > 0).
struct TreeAddress {
  long long u = 0;
  std::string w;
  std::string print() const;
  static TreeAddress parse(const VertexId& v);
};

}  // namespace spiderlab
