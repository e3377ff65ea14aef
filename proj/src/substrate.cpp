#include "spiderlab/substrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <thread>
#include <unordered_set>

namespace spiderlab {

namespace {

int g_thread_override = 0;

const char kLabels[] = "0123456789abcdefghijklmnopqrstuvwxyz";

char label_char(int i) { return kLabels[i]; }

int label_index(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  throw ParameterError(std::string("bad branch label: ") + c);
}

long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw ParameterError("bad integer address: " + s);
  return v;
}

bool is_power_of_two(long long x) { return x >= 2 && (x & (x - 1)) == 0; }

}  // namespace

int default_threads() {
  if (g_thread_override > 0) return g_thread_override;
  if (const char* env = std::getenv("SPIDERLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void set_default_threads(int n) { g_thread_override = n; }

double Substrate::height_of(const VertexId& v) const {
  if (!height) throw ParameterError("substrate has no height functional");
  return height(v);
}

long long Substrate::dist_between(const VertexId& x, const VertexId& y) const {
  if (dist) return dist(x, y);
  if (x == y) return 0;
  // BFS fallback over the oracle; bounded to keep mistakes loud.
  std::unordered_set<VertexId> seen{x};
  std::deque<std::pair<VertexId, long long>> queue{{x, 0}};
  while (!queue.empty()) {
    auto [v, d] = queue.front();
    queue.pop_front();
    if (d > 10'000) break;
    for (const auto& e : neighbors(v)) {
      if (e.to == y) return d + 1;
      if (seen.insert(e.to).second) queue.emplace_back(e.to, d + 1);
    }
  }
  throw NumericalError("dist fallback did not reach target");
}

Family family_from_string(const std::string& name) {
  if (name == "line") return Family::Line;
  if (name == "lamperti_halfline") return Family::LampertiHalfline;
  if (name == "rooted_tree") return Family::RootedTree;
  if (name == "tree_with_end") return Family::TreeWithEnd;
  if (name == "product_z3_z") return Family::ProductZ3Z;
  if (name == "decorated_line") return Family::DecoratedLine;
  if (name == "star_of_segments") return Family::StarOfSegments;
  throw ParameterError("unknown substrate family: " + name);
}

std::string family_to_string(Family f) {
  switch (f) {
    case Family::Line: return "line";
    case Family::LampertiHalfline: return "lamperti_halfline";
    case Family::RootedTree: return "rooted_tree";
    case Family::TreeWithEnd: return "tree_with_end";
    case Family::ProductZ3Z: return "product_z3_z";
    case Family::DecoratedLine: return "decorated_line";
    case Family::StarOfSegments: return "star_of_segments";
  }
  throw ParameterError("unknown family enum");
}

std::string TreeAddress::print() const {
  return std::to_string(u) + ":" + w;
}

TreeAddress TreeAddress::parse(const VertexId& v) {
  auto colon = v.find(':');
  if (colon == std::string::npos)
    throw ParameterError("bad tree address: " + v);
  TreeAddress a;
  a.u = parse_int(v.substr(0, colon));
  a.w = v.substr(colon + 1);
  if (a.u < 0) throw ParameterError("bad tree address: " + v);
  if (a.u > 0 && !a.w.empty() && a.w[0] == '0')
    throw ParameterError("non-canonical tree address: " + v);
  return a;
}

namespace {

Substrate make_line(double p, double q) {
  if (p <= 0.0 || q <= 0.0) throw ParameterError("line needs p, q > 0");
  Substrate s;
  s.family = "line";
  s.root = "0";
  s.integer_addresses = true;
  s.neighbors = [p, q](const VertexId& v) {
    long long x = parse_int(v);
    return std::vector<NeighborEdge>{{std::to_string(x + 1), p, q},
                                     {std::to_string(x - 1), q, p}};
  };
  s.height = [](const VertexId& v) { return double(parse_int(v)); };
  s.dist = [](const VertexId& a, const VertexId& b) {
    return std::llabs(parse_int(a) - parse_int(b));
  };
  return s;
}

Substrate make_lamperti(std::function<double(long long)> up) {
  if (!up) throw ParameterError("lamperti_halfline needs an up-rate function");
  auto w = [up](long long x) {
    double r = up(x);
    if (!(r > 0.0 && r < 1.0))
      throw ParameterError("lamperti up rate must lie in (0,1)");
    return r;
  };
  Substrate s;
  s.family = "lamperti_halfline";
  s.root = "0";
  s.integer_addresses = true;
  s.neighbors = [w](const VertexId& v) {
    long long x = parse_int(v);
    if (x < 0) throw ParameterError("half-line address must be >= 0");
    if (x == 0)
      return std::vector<NeighborEdge>{{"1", 1.0, 1.0 - w(1)}};
    std::vector<NeighborEdge> out;
    out.push_back({std::to_string(x + 1), w(x), 1.0 - w(x + 1)});
    out.push_back({std::to_string(x - 1), 1.0 - w(x), x == 1 ? 1.0 : w(x - 1)});
    return out;
  };
  s.height = [](const VertexId& v) { return double(parse_int(v)); };
  s.dist = [](const VertexId& a, const VertexId& b) {
    return std::llabs(parse_int(a) - parse_int(b));
  };
  return s;
}

Substrate make_rooted_tree(int M) {
  if (M < 3) throw ParameterError("rooted_tree needs M >= 3");
  if (M > 36) throw ParameterError("rooted_tree address alphabet caps M at 36");
  Substrate s;
  s.family = "rooted_tree";
  s.root = "o";
  s.is_tree = true;
  s.neighbors = [M](const VertexId& v) {
    if (v.empty() || v[0] != 'o')
      throw ParameterError("bad rooted-tree address: " + v);
    std::vector<NeighborEdge> out;
    if (v.size() > 1) out.push_back({v.substr(0, v.size() - 1), 1.0, 1.0});
    int children = (v == "o") ? M : M - 1;
    for (int d = 0; d < children; ++d)
      out.push_back({v + label_char(d), 1.0, 1.0});
    return out;
  };
  s.height = [](const VertexId& v) { return double(v.size() - 1); };
  s.dist = [](const VertexId& a, const VertexId& b) {
    std::size_t c = 0;
    while (c < a.size() && c < b.size() && a[c] == b[c]) ++c;
    return (long long)(a.size() - c) + (long long)(b.size() - c);
  };
  return s;
}

Substrate make_tree_with_end(int M, double a, bool unit_rates) {
  if (M < 3) throw ParameterError("tree_with_end needs M >= 3");
  if (M > 36)
    throw ParameterError("tree_with_end address alphabet caps M at 36");
  if (!unit_rates && !(a > 0.0 && a < 1.0))
    throw ParameterError("tree_with_end needs a in (0,1)");
  double rf = unit_rates ? 1.0 : 1.0 - a;           // toward the end
  double rs = unit_rates ? 1.0 : a / (M - 1);        // toward each son
  Substrate s;
  s.family = "tree_with_end";
  s.root = "0:";
  s.is_tree = true;
  s.neighbors = [M, rf, rs](const VertexId& v) {
    TreeAddress t = TreeAddress::parse(v);
    std::vector<NeighborEdge> out;
    if (!t.w.empty()) {
      out.push_back({TreeAddress{t.u, t.w.substr(0, t.w.size() - 1)}.print(),
                     rf, rs});
      for (int d = 0; d < M - 1; ++d)
        out.push_back({TreeAddress{t.u, t.w + label_char(d)}.print(), rs, rf});
    } else {
      out.push_back({TreeAddress{t.u + 1, ""}.print(), rf, rs});
      if (t.u > 0) {
        // Branch 0 from an ancestor descends back toward the origin.
        out.push_back({TreeAddress{t.u - 1, ""}.print(), rs, rf});
        for (int d = 1; d < M - 1; ++d)
          out.push_back(
              {TreeAddress{t.u, std::string(1, label_char(d))}.print(), rs, rf});
      } else {
        for (int d = 0; d < M - 1; ++d)
          out.push_back(
              {TreeAddress{0, std::string(1, label_char(d))}.print(), rs, rf});
      }
    }
    return out;
  };
  s.height = [](const VertexId& v) {
    TreeAddress t = TreeAddress::parse(v);
    return double((long long)t.w.size() - t.u);
  };
  s.dist = [](const VertexId& av, const VertexId& bv) {
    TreeAddress x = TreeAddress::parse(av);
    TreeAddress y = TreeAddress::parse(bv);
    auto father = [](TreeAddress& t) {
      if (!t.w.empty())
        t.w.pop_back();
      else
        ++t.u;
    };
    auto h = [](const TreeAddress& t) {
      return (long long)t.w.size() - t.u;
    };
    long long d = 0;
    while (h(x) > h(y)) { father(x); ++d; }
    while (h(y) > h(x)) { father(y); ++d; }
    while (x.u != y.u || x.w != y.w) {
      father(x);
      father(y);
      d += 2;
    }
    return d;
  };
  return s;
}

Substrate make_product_z3_z() {
  Substrate s;
  s.family = "product_z3_z";
  s.root = "0,0";
  auto parse = [](const VertexId& v) {
    auto comma = v.find(',');
    if (comma == std::string::npos)
      throw ParameterError("bad product address: " + v);
    long long u = parse_int(v.substr(0, comma));
    long long x = parse_int(v.substr(comma + 1));
    if (u < 0 || u > 2) throw ParameterError("ring index out of range: " + v);
    return std::pair<long long, long long>{u, x};
  };
  auto print = [](long long u, long long x) {
    return std::to_string(u) + "," + std::to_string(x);
  };
  s.neighbors = [parse, print](const VertexId& v) {
    auto [u, x] = parse(v);
    return std::vector<NeighborEdge>{{print((u + 1) % 3, x), 1.0, 1.0},
                                     {print((u + 2) % 3, x), 1.0, 1.0},
                                     {print(u, x + 1), 1.0, 1.0},
                                     {print(u, x - 1), 1.0, 1.0}};
  };
  s.height = [parse](const VertexId& v) { return double(parse(v).second); };
  s.dist = [parse](const VertexId& a, const VertexId& b) {
    auto [ua, xa] = parse(a);
    auto [ub, xb] = parse(b);
    return (ua == ub ? 0LL : 1LL) + std::llabs(xa - xb);
  };
  return s;
}

Substrate make_decorated_line() {
  Substrate s;
  s.family = "decorated_line";
  s.root = "0";
  s.is_tree = true;
  auto base_of = [](const VertexId& v) {
    bool pendant = !v.empty() && v.back() == '#';
    long long x = parse_int(pendant ? v.substr(0, v.size() - 1) : v);
    if (pendant && !is_power_of_two(x))
      throw ParameterError("no pendant at site " + std::to_string(x));
    return std::pair<long long, bool>{x, pendant};
  };
  s.neighbors = [base_of](const VertexId& v) {
    auto [x, pendant] = base_of(v);
    if (pendant)
      return std::vector<NeighborEdge>{{std::to_string(x), 1.0, 1.0}};
    std::vector<NeighborEdge> out{{std::to_string(x + 1), 1.0, 1.0},
                                  {std::to_string(x - 1), 1.0, 1.0}};
    if (is_power_of_two(x)) out.push_back({std::to_string(x) + "#", 1.0, 1.0});
    return out;
  };
  s.height = [base_of](const VertexId& v) { return double(base_of(v).first); };
  s.dist = [base_of](const VertexId& a, const VertexId& b) {
    if (a == b) return 0LL;
    auto [xa, pa] = base_of(a);
    auto [xb, pb] = base_of(b);
    return std::llabs(xa - xb) + (pa ? 1 : 0) + (pb ? 1 : 0);
  };
  return s;
}

Substrate make_star(const GenParams& params) {
  if (params.p <= 0.0 || params.q <= 0.0)
    throw ParameterError("star_of_segments needs p, q > 0");
  std::vector<int> segs = params.segments;
  if (segs.empty()) {
    if (params.n_max < 1) throw ParameterError("star needs N_max >= 1");
    for (int n = 1; n <= params.n_max; ++n) segs.push_back(n);
  }
  std::sort(segs.begin(), segs.end());
  if (segs.front() < 1) throw ParameterError("segment lengths must be >= 1");
  if (std::adjacent_find(segs.begin(), segs.end()) != segs.end())
    throw ParameterError("segment lengths must be distinct");
  double norm = 0.0;
  for (int n : segs) norm += std::pow(0.5, n);
  std::unordered_map<long long, double> hub_rate;
  for (int n : segs) hub_rate[n] = std::pow(0.5, n) / norm;
  double p = params.p, q = params.q;

  auto parse = [segs](const VertexId& v) {
    auto colon = v.find(':');
    if (colon == std::string::npos)
      throw ParameterError("bad star address: " + v);
    long long n = parse_int(v.substr(0, colon));
    long long x = parse_int(v.substr(colon + 1));
    if (x < 1 || x > n || !std::binary_search(segs.begin(), segs.end(), (int)n))
      throw ParameterError("bad star address: " + v);
    return std::pair<long long, long long>{n, x};
  };
  auto print = [](long long n, long long x) {
    return std::to_string(n) + ":" + std::to_string(x);
  };

  Substrate s;
  s.family = "star_of_segments";
  s.root = "0";
  s.is_tree = true;
  if ((int)segs.size() > s.degree_cap)
    throw SizeError("hub degree exceeds the degree cap");
  s.neighbors = [=](const VertexId& v) {
    if (v == "0") {
      std::vector<NeighborEdge> out;
      for (int n : segs) out.push_back({print(n, 1), hub_rate.at(n), q});
      return out;
    }
    auto [n, x] = parse(v);
    std::vector<NeighborEdge> out;
    if (x < n) out.push_back({print(n, x + 1), p, q});
    if (x > 1)
      out.push_back({print(n, x - 1), q, p});
    else
      out.push_back({"0", q, hub_rate.at(n)});
    return out;
  };
  // Segment tips hold a jump-chain self-loop of weight p.
  s.loop_rate = [parse, p](const VertexId& v) {
    if (v == "0") return 0.0;
    auto [n, x] = parse(v);
    return x == n ? p : 0.0;
  };
  s.height = [parse](const VertexId& v) {
    return v == "0" ? 0.0 : double(parse(v).second);
  };
  s.dist = [parse](const VertexId& a, const VertexId& b) {
    if (a == b) return 0LL;
    if (a == "0") return parse(b).second;
    if (b == "0") return parse(a).second;
    auto [na, xa] = parse(a);
    auto [nb, xb] = parse(b);
    return na == nb ? std::llabs(xa - xb) : xa + xb;
  };
  return s;
}

}  // namespace

Substrate generate(Family family, const GenParams& params) {
  switch (family) {
    case Family::Line: return make_line(params.p, params.q);
    case Family::LampertiHalfline: return make_lamperti(params.up_rate);
    case Family::RootedTree: return make_rooted_tree(params.M);
    case Family::TreeWithEnd:
      return make_tree_with_end(params.M, params.a, params.unit_rates);
    case Family::ProductZ3Z: return make_product_z3_z();
    case Family::DecoratedLine: return make_decorated_line();
    case Family::StarOfSegments: return make_star(params);
  }
  throw ParameterError("unknown family enum");
}

FiniteNetwork materialize_ball(const Substrate& sub, const VertexId& center,
                               int radius, const Limits& limits) {
  if (radius < 1) throw ParameterError("ball radius must be >= 1");
  FiniteNetwork net;
  std::vector<int> depth;
  net.add_vertex(center);
  depth.push_back(0);
  net.root = 0;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    auto edges = sub.neighbors(net.vertices[i]);
    if ((int)edges.size() > sub.degree_cap)
      throw SizeError("vertex degree exceeds the degree cap");
    for (const auto& e : edges) {
      auto it = net.index.find(e.to);
      if (it != net.index.end()) {
        int j = it->second;
        if (net.rate(i, j) == 0.0) net.add_edge(i, j, e.forward, e.backward);
      } else if (depth[i] < radius) {
        if (net.vertices.size() >= limits.vertex_cap)
          throw SizeError("ball exceeds the vertex cap");
        int j = net.add_vertex(e.to);
        depth.push_back(depth[i] + 1);
        queue.push_back(j);
        net.add_edge(i, j, e.forward, e.backward);
      }
    }
  }
  for (int i = 0; i < net.size(); ++i) {
    net.boundary[i] = depth[i] == radius ? 1 : 0;
    net.loop[i] = sub.loop_of(net.vertices[i]);
  }
  return net;
}

}  // namespace spiderlab
