#include "spiderlab/network.hpp"

#include <deque>

#include "json.hpp"

namespace spiderlab {

std::string FiniteNetwork::to_json() const {
  nlohmann::json j;
  j["vertices"] = vertices;
  j["root"] = root;
  nlohmann::json edges = nlohmann::json::array();
  for (int i = 0; i < size(); ++i)
    for (const auto& [k, q] : adj[i])
      if (i < k) edges.push_back({i, k, q, rate(k, i)});
  j["edges"] = std::move(edges);
  std::vector<int> bnd;
  for (int i = 0; i < size(); ++i)
    if (boundary[i]) bnd.push_back(i);
  j["boundary"] = bnd;
  nlohmann::json loops = nlohmann::json::array();
  for (int i = 0; i < size(); ++i)
    if (loop[i] > 0.0) loops.push_back({i, loop[i]});
  if (!loops.empty()) j["loops"] = std::move(loops);
  return j.dump(2);
}

FiniteNetwork FiniteNetwork::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  FiniteNetwork net;
  for (const auto& v : j.at("vertices")) net.add_vertex(v.get<std::string>());
  net.root = j.at("root").get<int>();
  if (net.root < 0 || net.root >= net.size())
    throw ParameterError("root index out of range");
  for (const auto& e : j.at("edges")) {
    int i = e.at(0).get<int>();
    int k = e.at(1).get<int>();
    net.add_edge(i, k, e.at(2).get<double>(), e.at(3).get<double>());
  }
  if (j.contains("boundary"))
    for (const auto& b : j["boundary"]) net.boundary.at(b.get<int>()) = 1;
  if (j.contains("loops"))
    for (const auto& l : j["loops"])
      net.loop.at(l.at(0).get<int>()) = l.at(1).get<double>();
  return net;
}

std::vector<int> distances_from(const FiniteNetwork& net, int source,
                                bool interior_only) {
  std::vector<int> d(net.size(), -1);
  std::deque<int> queue;
  d[source] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (const auto& [y, q] : net.adj[x]) {
      if (d[y] >= 0) continue;
      if (interior_only && net.boundary[y]) continue;
      d[y] = d[x] + 1;
      queue.push_back(y);
    }
  }
  return d;
}

std::optional<int> distance(const FiniteNetwork& net, const VertexId& x,
                            const VertexId& y) {
  int i = net.id_of(x);
  int j = net.id_of(y);
  int d = distances_from(net, i)[j];
  if (d < 0) return std::nullopt;
  return d;
}

}  // namespace spiderlab
