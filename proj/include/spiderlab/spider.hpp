#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spiderlab/substrate.hpp"

namespace spiderlab {

// A spider configuration: ordered tuple of distinct leg positions.
using Config = std::vector<VertexId>;

std::string config_address(const Config& legs);
Config parse_config(const std::string& address);

// Admissibility rule for k-leg configurations.
struct ConfigRule {
  enum class Kind { BoundedSpan, ExplicitTable, Custom };

  Kind kind = Kind::BoundedSpan;
  int k = 2;
  int s = 2;
  // Left-leg convention: legs are kept sorted (numerically on integer
  // substrates, lexicographically otherwise), so leg tuples are treated as
  // unordered shapes. Required for the stretched-line identification.
  bool leftmost_first = false;
  // Explicit tables (integer substrates): each row is the k leg offsets
  // relative to the first leg; first entry must be 0.
  std::vector<std::vector<long long>> offsets;
  std::function<bool(const Config&, const Substrate&)> predicate;

  static ConfigRule bounded_span(int k, int s, bool leftmost_first = false);
  static ConfigRule explicit_table(int k,
                                   std::vector<std::vector<long long>> offsets);
  static ConfigRule custom(int k,
                           std::function<bool(const Config&, const Substrate&)>
                               predicate);
  static ConfigRule from_json(const std::string& text);

  bool admissible(const Config& legs, const Substrate& sub) const;
  Config canonicalize(Config legs, const Substrate& sub) const;
};

// Lazy substrate over admissible configurations: vertices are config
// addresses, edges are single-leg substrate moves whose target stays
// admissible (blocked moves are suppressed entirely). Height, when the base
// substrate has one, is the mean leg height.
Substrate spider_substrate(const Substrate& base, const ConfigRule& rule);

struct SpiderNetwork {
  FiniteNetwork net;
  Substrate base;
  Substrate configs;  // lazy spider substrate over the same rule
  ConfigRule rule;
  Config start;
};

// Enumerates every admissible configuration whose legs lie in the substrate
// ball of the given radius around the substrate root (custom rules fall back
// to the closure reachable from `start`). Configs with a leg at substrate
// depth >= radius - s are boundary-flagged so interior configs always have
// untruncated neighborhoods.
SpiderNetwork build_spider_network(const Substrate& sub, const ConfigRule& rule,
                                   const Config& start, int radius,
                                   const Limits& limits = {});

struct IrreducibilityReport {
  bool irreducible = false;
  VertexId witness_a, witness_b;  // mutually unreachable configs on failure
};

IrreducibilityReport check_irreducible(const SpiderNetwork& spn);

// The leg closest to the root, ties broken by the smallest index in the
// given enumeration (defaults to the network's vertex order).
VertexId global_position(const Config& cfg, const FiniteNetwork& net,
                         const std::vector<VertexId>& enumeration = {});

// Height of the geodesic midpoint of a 2-leg configuration on a tree.
double midpoint_height(const Config& cfg, const Substrate& sub);

struct ConfigDiameterReport {
  int diameter = 0;
  bool truncated = false;
  int config_count = 0;
};

// Max spider-graph distance between configurations having a leg at `site`.
ConfigDiameterReport config_diameter(const SpiderNetwork& spn,
                                     const VertexId& site);

// A k-leg path configuration grown greedily from the substrate root
// (consecutive legs adjacent).
Config lined_start(const Substrate& sub, int k);

// Stretched-line identification for the 2-leg span-2 spider on integer
// substrates: (x, x+i) <-> 2x + i - 1.
long long stretched_line_index(const Config& cfg);
Config stretched_line_config(long long index);

}  // namespace spiderlab
