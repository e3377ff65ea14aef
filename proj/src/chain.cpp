#include "spiderlab/chain.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <thread>
#include <unordered_set>

#include "spiderlab/rng.hpp"

namespace spiderlab {

JumpChain jump_chain(const FiniteNetwork& net) {
  JumpChain jc;
  int n = net.size();
  jc.exit.resize(n);
  jc.holding.resize(n);
  jc.prob.resize(n);
  for (int i = 0; i < n; ++i) {
    double total = net.exit_rate(i);
    if (total <= 0.0 && !net.boundary[i])
      throw NumericalError("absorbing interior state: " + net.vertices[i]);
    jc.exit[i] = total;
    jc.holding[i] = total > 0.0 ? 1.0 / total : 0.0;
    if (total <= 0.0) continue;
    for (const auto& [j, q] : net.adj[i]) jc.prob[i].emplace_back(j, q / total);
    if (net.loop[i] > 0.0) jc.prob[i].emplace_back(i, net.loop[i] / total);
  }
  return jc;
}

ReversibleStructure reversible_measure(const FiniteNetwork& net, double tol) {
  int n = net.size();
  ReversibleStructure rs;
  rs.mu.assign(n, 0.0);
  std::vector<char> seen(n, 0);
  rs.mu[net.root] = 1.0;
  seen[net.root] = 1;
  std::deque<int> queue{net.root};
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    for (const auto& [y, q_xy] : net.adj[x]) {
      if (seen[y]) continue;
      double q_yx = net.rate(y, x);
      rs.mu[y] = rs.mu[x] * q_xy / q_yx;
      seen[y] = 1;
      queue.push_back(y);
    }
  }
  for (int i = 0; i < n; ++i)
    if (!seen[i])
      throw NumericalError("network disconnected at vertex " + net.vertices[i]);
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, q_ij] : net.adj[i]) {
      if (j < i) continue;
      double lhs = rs.mu[i] * q_ij;
      double rhs = rs.mu[j] * net.rate(j, i);
      if (std::abs(lhs - rhs) > tol * std::max(1.0, std::abs(lhs)))
        throw NumericalError("detailed balance fails on cycle through edge " +
                             net.vertices[i] + " -- " + net.vertices[j]);
    }
  }
  rs.pi.resize(n);
  rs.cond.resize(n);
  for (int i = 0; i < n; ++i) {
    rs.pi[i] = net.exit_rate(i) * rs.mu[i];
    for (const auto& [j, q_ij] : net.adj[i])
      rs.cond[i].emplace_back(j, rs.mu[i] * q_ij);
  }
  return rs;
}

double effective_resistance(const FiniteNetwork& net, const VertexId& source,
                            const std::vector<VertexId>& sinks) {
  if (sinks.empty()) throw ParameterError("sink set must be nonempty");
  int s = net.id_of(source);
  std::unordered_set<int> sink_set;
  for (const auto& v : sinks) sink_set.insert(net.id_of(v));
  if (sink_set.count(s)) throw ParameterError("source must not be a sink");

  ReversibleStructure rs = reversible_measure(net);

  // Restrict to the region reachable from the source without crossing sinks.
  std::vector<char> free(net.size(), 0);
  bool touches_sink = false;
  {
    std::deque<int> queue{s};
    free[s] = 1;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (const auto& [y, c] : rs.cond[x]) {
        if (sink_set.count(y)) {
          touches_sink = true;
          continue;
        }
        if (!free[y]) {
          free[y] = 1;
          queue.push_back(y);
        }
      }
    }
  }
  if (!touches_sink)
    throw NumericalError("source is disconnected from every sink");

  std::vector<int> unknown_id(net.size(), -1);
  std::vector<int> unknowns;
  for (int i = 0; i < net.size(); ++i)
    if (free[i] && i != s) {
      unknown_id[i] = (int)unknowns.size();
      unknowns.push_back(i);
    }

  int n = (int)unknowns.size();
  Eigen::VectorXd v(n);
  if (n > 0) {
    Eigen::SparseMatrix<double> L(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int row = 0; row < n; ++row) {
      int i = unknowns[row];
      double diag = 0.0;
      for (const auto& [j, c] : rs.cond[i]) {
        diag += c;
        if (j == s)
          b[row] += c;  // source held at potential 1
        else if (unknown_id[j] >= 0)
          trip.emplace_back(row, unknown_id[j], -c);
        // sinks held at potential 0
      }
      trip.emplace_back(row, row, diag);
    }
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(std::max(2000, 20 * n));
    cg.compute(L);
    v = cg.solve(b);
    if (cg.info() != Eigen::Success)
      throw NumericalError("conjugate gradient failed to converge");
  }

  double current = 0.0;
  for (const auto& [j, c] : rs.cond[s]) {
    double vj = sink_set.count(j) ? 0.0 : (unknown_id[j] >= 0 ? v[unknown_id[j]] : 1.0);
    current += c * (1.0 - vj);
  }
  if (current <= 0.0) throw NumericalError("no current leaves the source");
  return 1.0 / current;
}

HittingTimeReport hitting_times(const FiniteNetwork& net,
                                const std::vector<VertexId>& targets,
                                HittingMode mode) {
  if (targets.empty()) throw ParameterError("target set must be nonempty");
  int n = net.size();
  std::vector<char> in_b(n, 0);
  for (const auto& v : targets) in_b[net.id_of(v)] = 1;

  JumpChain jc = jump_chain(net);

  // Rate support is symmetric, so reachability of B is connectivity to B.
  {
    std::vector<char> ok(n, 0);
    std::deque<int> queue;
    for (int i = 0; i < n; ++i)
      if (in_b[i]) {
        ok[i] = 1;
        queue.push_back(i);
      }
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (const auto& [y, q] : net.adj[x])
        if (!ok[y]) {
          ok[y] = 1;
          queue.push_back(y);
        }
    }
    std::string bad;
    int bad_count = 0;
    for (int i = 0; i < n; ++i)
      if (!ok[i] || (jc.exit[i] <= 0.0 && !in_b[i])) {
        if (bad_count < 5) bad += (bad.empty() ? "" : ", ") + net.vertices[i];
        ++bad_count;
      }
    if (bad_count > 0)
      throw NumericalError("targets unreachable from " +
                           std::to_string(bad_count) + " state(s): " + bad);
  }

  std::vector<int> row_of(n, -1);
  std::vector<int> rows;
  for (int i = 0; i < n; ++i)
    if (!in_b[i]) {
      row_of[i] = (int)rows.size();
      rows.push_back(i);
    }

  HittingTimeReport rep;
  rep.targets = targets;
  for (int i : rows)
    if (net.boundary[i]) rep.boundary_in_system = true;

  int m = (int)rows.size();
  Eigen::VectorXd hit_steps = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd hit_time = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    Eigen::SparseMatrix<double> A(m, m);
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < m; ++r) {
      int i = rows[r];
      trip.emplace_back(r, r, 1.0);
      for (const auto& [j, p] : jc.prob[i])
        if (row_of[j] >= 0) trip.emplace_back(r, row_of[j], -p);
    }
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
      throw NumericalError("hitting-time system is singular");
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    Eigen::VectorXd hold(m);
    for (int r = 0; r < m; ++r) hold[r] = jc.holding[rows[r]];
    hit_steps = lu.solve(ones);
    hit_time = lu.solve(hold);
    for (int r = 0; r < m; ++r) {
      int i = rows[r];
      double res_s = hit_steps[r] - 1.0;
      double res_t = hit_time[r] - jc.holding[i];
      for (const auto& [j, p] : jc.prob[i])
        if (row_of[j] >= 0) {
          res_s -= p * hit_steps[row_of[j]];
          res_t -= p * hit_time[row_of[j]];
        }
      rep.residual =
          std::max({rep.residual,
                    std::abs(res_s) / std::max(1.0, std::abs(hit_steps[r])),
                    std::abs(res_t) / std::max(1.0, std::abs(hit_time[r]))});
    }
  }

  rep.steps.assign(n, 0.0);
  rep.time.assign(n, 0.0);
  if (mode == HittingMode::Hit) {
    for (int r = 0; r < m; ++r) {
      rep.steps[rows[r]] = hit_steps[r];
      rep.time[rows[r]] = hit_time[r];
    }
  } else {
    // E_x[tau_B] with tau_B >= 1 via one explicit first step.
    for (int i = 0; i < n; ++i) {
      double s_val = 1.0;
      double t_val = jc.holding[i];
      for (const auto& [j, p] : jc.prob[i])
        if (row_of[j] >= 0) {
          s_val += p * hit_steps[row_of[j]];
          t_val += p * hit_time[row_of[j]];
        }
      rep.steps[i] = s_val;
      rep.time[i] = t_val;
    }
  }
  return rep;
}

namespace {

struct StepResult {
  VertexId state;
  double dt = 0.0;
  bool frozen = false;
};

StepResult step_once(const Substrate& sub, const VertexId& state, Philox& rng) {
  auto edges = sub.neighbors(state);
  double total = 0.0;
  for (const auto& e : edges) total += e.forward;
  if (total <= 0.0) return {state, 0.0, true};
  StepResult out;
  out.dt = rng.next_exponential(total);
  double r = rng.next_double() * total;
  double acc = 0.0;
  for (const auto& e : edges) {
    acc += e.forward;
    if (r < acc || &e == &edges.back()) {
      out.state = e.to;
      return out;
    }
  }
  out.state = edges.back().to;
  return out;
}

}  // namespace

Trace simulate(const Substrate& sub, const VertexId& start, long long n_jumps,
               std::uint64_t seed, std::uint64_t stream) {
  if (n_jumps < 1) throw ParameterError("n_jumps must be >= 1");
  Philox rng(seed, stream);
  Trace tr;
  tr.seed = seed;
  tr.stream = stream;
  tr.times.reserve(n_jumps + 1);
  tr.states.reserve(n_jumps + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(start);
  VertexId state = start;
  double t = 0.0;
  for (long long step = 0; step < n_jumps; ++step) {
    StepResult r = step_once(sub, state, rng);
    if (r.frozen) {
      tr.frozen = true;
      break;
    }
    t += r.dt;
    state = r.state;
    tr.times.push_back(t);
    tr.states.push_back(state);
  }
  return tr;
}

SpeedReport mc_speed(const Substrate& sub, const VertexId& start,
                     long long n_jumps, int replicas, std::uint64_t seed,
                     int threads) {
  if (replicas < 2) throw ParameterError("mc_speed needs replicas >= 2");
  if (n_jumps < 1) throw ParameterError("n_jumps must be >= 1");
  if (!sub.height)
    throw ParameterError("mc_speed needs a height functional on the substrate");
  if (threads <= 0) threads = default_threads();
  threads = std::min(threads, replicas);

  std::vector<double> estimates(replicas, 0.0);
  double h0 = sub.height(start);
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      int r = next.fetch_add(1);
      if (r >= replicas) return;
      Philox rng(seed, (std::uint64_t)r);
      VertexId state = start;
      double t = 0.0;
      for (long long step = 0; step < n_jumps; ++step) {
        StepResult sr = step_once(sub, state, rng);
        if (sr.frozen) break;
        t += sr.dt;
        state = sr.state;
      }
      estimates[r] = t > 0.0 ? (sub.height(state) - h0) / t : 0.0;
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= replicas;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (double)(replicas - 1);

  SpeedReport rep;
  rep.estimate = mean;
  rep.stderr_ = std::sqrt(var / replicas);
  rep.provenance = "mc";
  rep.replicas = replicas;
  rep.n_jumps = n_jumps;
  rep.seed = seed;
  return rep;
}

}  // namespace spiderlab
