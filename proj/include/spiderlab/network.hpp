#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spiderlab/common.hpp"

namespace spiderlab {

using VertexId = std::string;

// Explicit finite network with sparse nonnegative rates q(x,y).
// Support is symmetric: q(x,y) > 0 iff q(y,x) > 0. Self-rates are kept
// separately in `loop` (they matter only for the embedded jump chain, e.g.
// the star-of-segments tip).
struct FiniteNetwork {
  std::vector<VertexId> vertices;
  std::unordered_map<VertexId, int> index;
  int root = -1;
  std::vector<std::vector<std::pair<int, double>>> adj;  // adj[i] = {(j, q_ij)}
  std::vector<double> loop;
  std::vector<char> boundary;

  int size() const { return static_cast<int>(vertices.size()); }

  bool contains(const VertexId& v) const { return index.count(v) > 0; }

  int id_of(const VertexId& v) const {
    auto it = index.find(v);
    if (it == index.end()) throw NotFoundError("vertex not in network: " + v);
    return it->second;
  }

  int add_vertex(const VertexId& v, bool is_boundary = false) {
    auto it = index.find(v);
    if (it != index.end()) return it->second;
    int i = size();
    index.emplace(v, i);
    vertices.push_back(v);
    adj.emplace_back();
    loop.push_back(0.0);
    boundary.push_back(is_boundary ? 1 : 0);
    return i;
  }

  // Adds both directions; rates must both be positive (adaptedness).
  void add_edge(int i, int j, double q_ij, double q_ji) {
    if (i == j) throw ParameterError("self-rates go in loop, not add_edge");
    if (q_ij <= 0.0 || q_ji <= 0.0)
      throw ParameterError("edge rates must be positive in both directions");
    adj[i].emplace_back(j, q_ij);
    adj[j].emplace_back(i, q_ji);
  }

  double rate(int i, int j) const {
    for (const auto& [k, q] : adj[i])
      if (k == j) return q;
    return 0.0;
  }

  double exit_rate(int i) const {
    double s = loop[i];
    for (const auto& [j, q] : adj[i]) s += q;
    return s;
  }

  std::string to_json() const;
  static FiniteNetwork from_json(const std::string& text);
};

// BFS shortest-path length over positive-rate edges; nullopt if unreachable.
std::optional<int> distance(const FiniteNetwork& net, const VertexId& x,
                            const VertexId& y);

// BFS distances from a single source to every vertex (-1 = unreachable).
std::vector<int> distances_from(const FiniteNetwork& net, int source,
                                bool interior_only = false);

}  // namespace spiderlab
