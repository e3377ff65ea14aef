#include "spiderlab/spider.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace spiderlab {

namespace {

long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw ParameterError("bad integer address: " + s);
  return v;
}

}  // namespace

std::string config_address(const Config& legs) {
  std::string out;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    if (i) out += '|';
    out += legs[i];
  }
  return out;
}

Config parse_config(const std::string& address) {
  Config legs;
  std::size_t begin = 0;
  while (true) {
    auto bar = address.find('|', begin);
    legs.push_back(address.substr(begin, bar - begin));
    if (bar == std::string::npos) break;
    begin = bar + 1;
  }
  return legs;
}

ConfigRule ConfigRule::bounded_span(int k, int s, bool leftmost_first) {
  if (k < 1) throw ParameterError("bounded_span needs k >= 1");
  if (s < 1) throw ParameterError("bounded_span needs s >= 1");
  ConfigRule r;
  r.kind = Kind::BoundedSpan;
  r.k = k;
  r.s = s;
  r.leftmost_first = leftmost_first;
  return r;
}

ConfigRule ConfigRule::explicit_table(
    int k, std::vector<std::vector<long long>> offsets) {
  if (k < 1) throw ParameterError("explicit_table needs k >= 1");
  if (offsets.empty()) throw ParameterError("explicit_table needs offsets");
  long long max_off = 0;
  for (const auto& row : offsets) {
    if ((int)row.size() != k)
      throw ParameterError("offset row length must equal k");
    if (row[0] != 0)
      throw ParameterError("offsets are relative to the first leg (row[0]=0)");
    std::unordered_set<long long> seen(row.begin(), row.end());
    if ((int)seen.size() != k)
      throw ParameterError("offset rows must have distinct entries");
    for (long long o : row) max_off = std::max(max_off, std::llabs(o));
  }
  ConfigRule r;
  r.kind = Kind::ExplicitTable;
  r.k = k;
  r.s = static_cast<int>(max_off);  // span bound implied by the table
  r.offsets = std::move(offsets);
  return r;
}

ConfigRule ConfigRule::custom(
    int k, std::function<bool(const Config&, const Substrate&)> predicate) {
  if (!predicate) throw ParameterError("custom rule needs a predicate");
  ConfigRule r;
  r.kind = Kind::Custom;
  r.k = k;
  r.predicate = std::move(predicate);
  return r;
}

ConfigRule ConfigRule::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "bounded_span")
    return bounded_span(j.at("k").get<int>(), j.at("s").get<int>(),
                        j.value("leftmost_first", false));
  if (kind == "explicit")
    return explicit_table(j.at("k").get<int>(),
                          j.at("offsets")
                              .get<std::vector<std::vector<long long>>>());
  throw ParameterError("unknown rule kind: " + kind);
}

bool ConfigRule::admissible(const Config& legs, const Substrate& sub) const {
  if ((int)legs.size() != k) return false;
  for (std::size_t i = 0; i < legs.size(); ++i)
    for (std::size_t j = i + 1; j < legs.size(); ++j)
      if (legs[i] == legs[j]) return false;
  switch (kind) {
    case Kind::BoundedSpan:
      for (std::size_t i = 0; i < legs.size(); ++i)
        for (std::size_t j = i + 1; j < legs.size(); ++j)
          if (sub.dist_between(legs[i], legs[j]) > s) return false;
      return true;
    case Kind::ExplicitTable: {
      long long base = parse_int(legs[0]);
      for (const auto& row : offsets) {
        bool match = true;
        for (int i = 0; i < k && match; ++i)
          match = parse_int(legs[i]) == base + row[i];
        if (match) return true;
      }
      return false;
    }
    case Kind::Custom:
      return predicate(legs, sub);
  }
  return false;
}

Config ConfigRule::canonicalize(Config legs, const Substrate& sub) const {
  if (!leftmost_first) return legs;
  if (sub.integer_addresses)
    std::sort(legs.begin(), legs.end(), [](const VertexId& a, const VertexId& b) {
      return parse_int(a) < parse_int(b);
    });
  else
    std::sort(legs.begin(), legs.end());
  return legs;
}

Substrate spider_substrate(const Substrate& base, const ConfigRule& rule) {
  Substrate s;
  s.family = "spider(" + base.family + ")";
  s.degree_cap = base.degree_cap * rule.k;
  s.neighbors = [base, rule](const VertexId& addr) {
    Config legs = parse_config(addr);
    if ((int)legs.size() != rule.k)
      throw RuleViolation("config has wrong leg count: " + addr);
    std::vector<NeighborEdge> out;
    for (int i = 0; i < rule.k; ++i) {
      for (const auto& e : base.neighbors(legs[i])) {
        Config target = legs;
        target[i] = e.to;
        if (!rule.admissible(target, base)) continue;
        std::string ta = config_address(rule.canonicalize(target, base));
        bool merged = false;
        for (auto& prev : out)
          if (prev.to == ta) {
            prev.forward += e.forward;
            prev.backward += e.backward;
            merged = true;
            break;
          }
        if (!merged) out.push_back({ta, e.forward, e.backward});
      }
    }
    return out;
  };
  if (base.height) {
    s.height = [base, rule](const VertexId& addr) {
      Config legs = parse_config(addr);
      double h = 0.0;
      for (const auto& leg : legs) h += base.height(leg);
      return h / (double)rule.k;
    };
  }
  if (base.loop_rate) {
    s.loop_rate = [base](const VertexId& addr) {
      double l = 0.0;
      for (const auto& leg : parse_config(addr)) l += base.loop_rate(leg);
      return l;
    };
  }
  return s;
}

namespace {

// All admissible configs whose legs lie in the ball (full enumeration).
std::vector<std::string> enumerate_configs(const Substrate& sub,
                                           const ConfigRule& rule,
                                           const FiniteNetwork& ball,
                                           const Limits& limits) {
  std::unordered_set<std::string> found;
  if (rule.kind == ConfigRule::Kind::ExplicitTable) {
    for (const auto& v : ball.vertices) {
      long long base = parse_int(v);
      for (const auto& row : rule.offsets) {
        Config legs;
        bool inside = true;
        for (long long o : row) {
          std::string addr = std::to_string(base + o);
          if (!ball.contains(addr)) {
            inside = false;
            break;
          }
          legs.push_back(addr);
        }
        if (inside) found.insert(config_address(legs));
      }
    }
  } else {
    // Candidate partners live within span s of the first leg.
    for (int vi = 0; vi < ball.size(); ++vi) {
      std::vector<int> near;
      {
        std::vector<int> d(ball.size(), -1);
        std::deque<int> queue{vi};
        d[vi] = 0;
        while (!queue.empty()) {
          int x = queue.front();
          queue.pop_front();
          if (d[x] == rule.s) continue;
          for (const auto& [y, q] : ball.adj[x])
            if (d[y] < 0) {
              d[y] = d[x] + 1;
              near.push_back(y);
              queue.push_back(y);
            }
        }
      }
      Config legs(rule.k);
      legs[0] = ball.vertices[vi];
      std::function<void(int)> extend = [&](int pos) {
        if (pos == rule.k) {
          if (rule.admissible(legs, sub))
            found.insert(config_address(rule.canonicalize(legs, sub)));
          if (found.size() > limits.vertex_cap)
            throw SizeError("spider network exceeds the vertex cap");
          return;
        }
        for (int u : near) {
          legs[pos] = ball.vertices[u];
          extend(pos + 1);
        }
      };
      extend(1);
    }
  }
  std::vector<std::string> out(found.begin(), found.end());
  std::sort(out.begin(), out.end());
  return out;
}

// Closure reachable from the start config (used for custom rules, where
// enumeration by span pruning is not available).
std::vector<std::string> reachable_configs(const Substrate& configs,
                                           const std::string& start,
                                           const FiniteNetwork& ball,
                                           const Limits& limits) {
  std::unordered_set<std::string> seen{start};
  std::deque<std::string> queue{start};
  auto inside = [&](const std::string& addr) {
    for (const auto& leg : parse_config(addr))
      if (!ball.contains(leg)) return false;
    return true;
  };
  while (!queue.empty()) {
    std::string c = queue.front();
    queue.pop_front();
    for (const auto& e : configs.neighbors(c)) {
      if (!inside(e.to) || !seen.insert(e.to).second) continue;
      if (seen.size() > limits.vertex_cap)
        throw SizeError("spider network exceeds the vertex cap");
      queue.push_back(e.to);
    }
  }
  std::vector<std::string> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

SpiderNetwork build_spider_network(const Substrate& sub, const ConfigRule& rule,
                                   const Config& start, int radius,
                                   const Limits& limits) {
  if (radius < 1) throw ParameterError("radius must be >= 1");
  if (!rule.admissible(start, sub))
    throw RuleViolation("start configuration is not admissible: " +
                        config_address(start));
  SpiderNetwork spn;
  spn.base = sub;
  spn.rule = rule;
  spn.configs = spider_substrate(sub, rule);
  spn.start = rule.canonicalize(start, sub);

  FiniteNetwork ball = materialize_ball(sub, sub.root, radius, limits);
  std::vector<int> depth = distances_from(ball, ball.root);

  std::vector<std::string> addrs =
      rule.kind == ConfigRule::Kind::Custom
          ? reachable_configs(spn.configs, config_address(spn.start), ball,
                              limits)
          : enumerate_configs(sub, rule, ball, limits);

  FiniteNetwork& net = spn.net;
  for (const auto& a : addrs) {
    bool bnd = false;
    for (const auto& leg : parse_config(a))
      if (depth[ball.id_of(leg)] >= radius - rule.s) bnd = true;
    int i = net.add_vertex(a, bnd);
    net.loop[i] = spn.configs.loop_of(a);
  }
  std::string start_addr = config_address(spn.start);
  if (!net.contains(start_addr))
    throw SizeError("start configuration lies outside the ball");
  net.root = net.id_of(start_addr);

  for (int i = 0; i < net.size(); ++i) {
    for (const auto& e : spn.configs.neighbors(net.vertices[i])) {
      auto it = net.index.find(e.to);
      if (it == net.index.end()) continue;  // a leg left the ball
      if (net.rate(i, it->second) == 0.0)
        net.add_edge(i, it->second, e.forward, e.backward);
    }
  }
  return spn;
}

IrreducibilityReport check_irreducible(const SpiderNetwork& spn) {
  const FiniteNetwork& net = spn.net;
  std::vector<int> interior;
  for (int i = 0; i < net.size(); ++i)
    if (!net.boundary[i]) interior.push_back(i);
  if (interior.empty())
    throw ParameterError("no interior configs; enlarge the radius");
  // Adaptedness makes rate support symmetric, so strong connectivity of the
  // interior reduces to plain connectivity.
  std::vector<int> comp(net.size(), -1);
  int n_comp = 0;
  for (int seed : interior) {
    if (comp[seed] >= 0) continue;
    comp[seed] = n_comp;
    std::deque<int> queue{seed};
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (const auto& [y, q] : net.adj[x])
        if (!net.boundary[y] && comp[y] < 0) {
          comp[y] = n_comp;
          queue.push_back(y);
        }
    }
    ++n_comp;
  }
  IrreducibilityReport rep;
  rep.irreducible = n_comp == 1;
  if (!rep.irreducible) {
    for (int i : interior)
      if (comp[i] == 0) {
        rep.witness_a = net.vertices[i];
        break;
      }
    for (int i : interior)
      if (comp[i] == 1) {
        rep.witness_b = net.vertices[i];
        break;
      }
  }
  return rep;
}

VertexId global_position(const Config& cfg, const FiniteNetwork& net,
                         const std::vector<VertexId>& enumeration) {
  std::vector<int> d = distances_from(net, net.root);
  auto enum_index = [&](const VertexId& v) -> std::size_t {
    if (enumeration.empty()) return net.id_of(v);
    for (std::size_t i = 0; i < enumeration.size(); ++i)
      if (enumeration[i] == v) return i;
    throw NotFoundError("vertex missing from enumeration: " + v);
  };
  const VertexId* best = nullptr;
  int best_d = 0;
  std::size_t best_e = 0;
  for (const auto& leg : cfg) {
    int dist_leg = d[net.id_of(leg)];
    if (dist_leg < 0) throw NumericalError("leg unreachable from root: " + leg);
    std::size_t e = enum_index(leg);
    if (!best || dist_leg < best_d || (dist_leg == best_d && e < best_e)) {
      best = &leg;
      best_d = dist_leg;
      best_e = e;
    }
  }
  return *best;
}

double midpoint_height(const Config& cfg, const Substrate& sub) {
  if (cfg.size() != 2)
    throw ParameterError("midpoint height is defined for 2-leg configs");
  if (sub.family != "tree_with_end" && sub.family != "rooted_tree")
    throw ParameterError("midpoint height needs a tree substrate");
  double h0 = sub.height_of(cfg[0]);
  double h1 = sub.height_of(cfg[1]);
  long long l = sub.dist_between(cfg[0], cfg[1]);
  return std::max(h0, h1) - (double)l / 2.0;
}

ConfigDiameterReport config_diameter(const SpiderNetwork& spn,
                                     const VertexId& site) {
  const FiniteNetwork& net = spn.net;
  std::vector<int> local;
  for (int i = 0; i < net.size(); ++i) {
    for (const auto& leg : parse_config(net.vertices[i]))
      if (leg == site) {
        local.push_back(i);
        break;
      }
  }
  if (local.empty())
    throw NotFoundError("no local configuration at site " + site);
  ConfigDiameterReport rep;
  rep.config_count = (int)local.size();
  for (int i : local)
    if (net.boundary[i]) rep.truncated = true;
  for (int src : local) {
    std::vector<int> d_int = distances_from(net, src, /*interior_only=*/true);
    std::vector<int> d_all;
    for (int dst : local) {
      int d = d_int[dst];
      if (d < 0 || net.boundary[src] || net.boundary[dst]) {
        if (d_all.empty()) d_all = distances_from(net, src);
        d = d_all[dst];
        rep.truncated = true;
        if (d < 0)
          throw NumericalError("local configurations mutually unreachable at " +
                               site);
      }
      rep.diameter = std::max(rep.diameter, d);
    }
  }
  return rep;
}

Config lined_start(const Substrate& sub, int k) {
  Config start{sub.root};
  while ((int)start.size() < k) {
    bool grew = false;
    for (const auto& e : sub.neighbors(start.back())) {
      if (std::find(start.begin(), start.end(), e.to) != start.end()) continue;
      start.push_back(e.to);
      grew = true;
      break;
    }
    if (!grew) throw NumericalError("could not grow a lined start config");
  }
  return start;
}

long long stretched_line_index(const Config& cfg) {
  if (cfg.size() != 2)
    throw ParameterError("stretched-line index needs a 2-leg config");
  long long a = parse_int(cfg[0]);
  long long b = parse_int(cfg[1]);
  long long x = std::min(a, b);
  long long i = std::llabs(a - b);
  if (i < 1 || i > 2)
    throw ParameterError("stretched-line index needs span 1 or 2");
  return 2 * x + i - 1;
}

Config stretched_line_config(long long index) {
  long long x = index / 2;
  long long i = index % 2 + 1;
  if (index < 0) throw ParameterError("stretched-line index must be >= 0");
  return {std::to_string(x), std::to_string(x + i)};
}

}  // namespace spiderlab
