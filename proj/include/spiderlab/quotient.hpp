#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spiderlab/chain.hpp"
#include "spiderlab/network.hpp"
#include "spiderlab/spider.hpp"

namespace spiderlab {

// Maps a state address to its block key.
using PartitionKey = std::function<std::string(const VertexId&)>;
// Height functional on state addresses (used for per-block increments).
using HeightFn = std::function<double(const VertexId&)>;

struct LumpabilityReport {
  bool lumpable = true;
  std::string block;
  VertexId member_a, member_b;
  std::string target_block;
  double rate_a = 0.0, rate_b = 0.0;
  std::string message() const;
};

// Strong lumpability: aggregate rates (and, when a height is supplied,
// aggregate height-weighted rates) into every target block must agree across
// all interior members of each block.
LumpabilityReport lumpability_check(const FiniteNetwork& net,
                                    const PartitionKey& key,
                                    double tol = kLumpabilityTol,
                                    const HeightFn& height = nullptr);

struct FactorChain {
  std::vector<std::string> blocks;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<std::pair<int, double>>> rates;  // lumped q
  std::vector<double> exit;
  std::vector<double> holding;
  std::vector<double> dH;  // E[height increment | jump from block]
  std::vector<double> pi;  // jump-chain stationary measure (via stationary())
  std::vector<VertexId> representative;
  bool has_height = false;

  int id_of(const std::string& block) const;
  std::string to_json() const;
};

// Factor chain of an explicit network; refuses (with witness) if the key is
// not lumpable at tol.
FactorChain factor_chain(const FiniteNetwork& net, const PartitionKey& key,
                         const HeightFn& height = nullptr,
                         double tol = kLumpabilityTol);

// Factor chain extracted directly from a lazy substrate by breadth-first
// search over blocks, one representative per block. Rows of additionally
// encountered members (up to verify_members per block) are cross-checked
// against the representative row, so lumpability violations still surface.
FactorChain factor_chain_lazy(const Substrate& states, const PartitionKey& key,
                              const VertexId& start,
                              const HeightFn& height = nullptr,
                              double tol = kLumpabilityTol,
                              int max_blocks = 100000, int verify_members = 8);

// Jump-chain stationary measure of the factor chain (the measure weighting
// the per-jump drift and holding sums). Fills fc.pi and returns it.
std::vector<double>& stationary(FactorChain& fc);

// D = sum pi(i) E[dH | i], T = sum pi(i) holding(i), V = D / T.
SpeedReport exact_speed(FactorChain& fc);

// |sum_{i in B} pi(i) m_{i,B} - 1| for jump-chain return times m_{i,B}.
double ksk_identity_check(FactorChain& fc, const std::vector<std::string>& B);

// Block key helpers for the paper's two quotients.
PartitionKey span_key(const Substrate& base);     // 2-leg span "span=<d>"
PartitionKey tree_lk_key(const Substrate& base);  // "(l,k)", k = |dh|

}  // namespace spiderlab
