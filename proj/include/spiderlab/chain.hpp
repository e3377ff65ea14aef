#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spiderlab/network.hpp"
#include "spiderlab/substrate.hpp"

namespace spiderlab {

// Embedded discrete chain of a continuous-time network. Self-loop weights
// (e.g. the star-of-segments tip) participate in the jump probabilities.
struct JumpChain {
  std::vector<double> exit;     // total rate out (including loop weight)
  std::vector<double> holding;  // mean holding time 1/exit
  // prob[i] = {(j, p_ij)}; includes (i, p_ii) when a loop weight is present.
  std::vector<std::vector<std::pair<int, double>>> prob;
};

JumpChain jump_chain(const FiniteNetwork& net);

struct ReversibleStructure {
  std::vector<double> mu;  // detailed-balance measure, mu(root) = 1
  std::vector<double> pi;  // pi(x) = exit-rate(x) * mu(x)
  // cond[i] = {(j, c_ij)} with c_ij = mu_i * q_ij = c_ji.
  std::vector<std::vector<std::pair<int, double>>> cond;
};

ReversibleStructure reversible_measure(const FiniteNetwork& net,
                                       double tol = kDetailedBalanceTol);

// Dirichlet solve: unit potential at source, zero on the sink set; returns
// 1 / (current out of source).
double effective_resistance(const FiniteNetwork& net, const VertexId& source,
                            const std::vector<VertexId>& sinks);

enum class HittingMode { Hit, Return };

struct HittingTimeReport {
  std::vector<VertexId> targets;
  std::vector<double> steps;  // expected jump-chain steps per start vertex
  std::vector<double> time;   // expected continuous time per start vertex
  double residual = 0.0;
  bool boundary_in_system = false;
};

HittingTimeReport hitting_times(const FiniteNetwork& net,
                                const std::vector<VertexId>& targets,
                                HittingMode mode);

struct Trace {
  std::vector<double> times;
  std::vector<VertexId> states;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool frozen = false;
};

// Competing-exponentials simulation directly on the lazy substrate, so
// there is no truncation bias. Deterministic given (seed, stream).
Trace simulate(const Substrate& sub, const VertexId& start, long long n_jumps,
               std::uint64_t seed, std::uint64_t stream = 0);

struct SpeedReport {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double drift_per_jump = 0.0;   // D
  double mean_holding = 0.0;     // T
  std::string provenance;        // "exact", "exact (frozen)", or "mc"
  int replicas = 0;
  long long n_jumps = 0;
  std::uint64_t seed = 0;
};

// Per-replica (height(end) - height(start)) / elapsed time; replicas run on
// independent RNG substreams, optionally in parallel.
SpeedReport mc_speed(const Substrate& sub, const VertexId& start,
                     long long n_jumps, int replicas, std::uint64_t seed,
                     int threads = 0);

}  // namespace spiderlab
