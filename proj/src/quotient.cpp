#include "spiderlab/quotient.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <unordered_map>

#include "json.hpp"

namespace spiderlab {

namespace {

// Aggregate (rate, rate * dh) into each target block.
using Row = std::map<std::string, std::pair<double, double>>;

Row row_of_network_state(const FiniteNetwork& net, int i,
                         const PartitionKey& key, const HeightFn& height) {
  Row row;
  double h_i = height ? height(net.vertices[i]) : 0.0;
  for (const auto& [j, q] : net.adj[i]) {
    double dh = height ? height(net.vertices[j]) - h_i : 0.0;
    auto& cell = row[key(net.vertices[j])];
    cell.first += q;
    cell.second += q * dh;
  }
  if (net.loop[i] > 0.0) row[key(net.vertices[i])].first += net.loop[i];
  return row;
}

Row row_of_substrate_state(const Substrate& states, const VertexId& addr,
                           const PartitionKey& key, const HeightFn& height) {
  Row row;
  double h = height ? height(addr) : 0.0;
  for (const auto& e : states.neighbors(addr)) {
    double dh = height ? height(e.to) - h : 0.0;
    auto& cell = row[key(e.to)];
    cell.first += e.forward;
    cell.second += e.forward * dh;
  }
  double loop = states.loop_of(addr);
  if (loop > 0.0) row[key(addr)].first += loop;
  return row;
}

bool rows_match(const Row& a, const Row& b, double tol, std::string* where,
                double* rate_a, double* rate_b) {
  for (const auto& [block, cell] : a) {
    auto it = b.find(block);
    double rb = it == b.end() ? 0.0 : it->second.first;
    double hb = it == b.end() ? 0.0 : it->second.second;
    if (std::abs(cell.first - rb) > tol || std::abs(cell.second - hb) > tol) {
      *where = block;
      *rate_a = cell.first;
      *rate_b = rb;
      return false;
    }
  }
  for (const auto& [block, cell] : b) {
    if (a.count(block)) continue;
    if (std::abs(cell.first) > tol) {
      *where = block;
      *rate_a = 0.0;
      *rate_b = cell.first;
      return false;
    }
  }
  return true;
}

}  // namespace

std::string LumpabilityReport::message() const {
  if (lumpable) return "lumpable";
  return "block " + block + ": members " + member_a + " and " + member_b +
         " send aggregate rates " + std::to_string(rate_a) + " vs " +
         std::to_string(rate_b) + " into block " + target_block;
}

LumpabilityReport lumpability_check(const FiniteNetwork& net,
                                    const PartitionKey& key, double tol,
                                    const HeightFn& height) {
  std::map<std::string, std::vector<int>> blocks;
  for (int i = 0; i < net.size(); ++i)
    if (!net.boundary[i]) blocks[key(net.vertices[i])].push_back(i);
  if (blocks.empty()) throw ParameterError("no interior states to partition");

  LumpabilityReport rep;
  for (const auto& [block, members] : blocks) {
    Row ref = row_of_network_state(net, members[0], key, height);
    for (std::size_t m = 1; m < members.size(); ++m) {
      Row row = row_of_network_state(net, members[m], key, height);
      std::string where;
      double ra, rb;
      if (!rows_match(ref, row, tol, &where, &ra, &rb)) {
        rep.lumpable = false;
        rep.block = block;
        rep.member_a = net.vertices[members[0]];
        rep.member_b = net.vertices[members[m]];
        rep.target_block = where;
        rep.rate_a = ra;
        rep.rate_b = rb;
        return rep;
      }
    }
  }
  return rep;
}

int FactorChain::id_of(const std::string& block) const {
  auto it = index.find(block);
  if (it == index.end()) throw NotFoundError("unknown block: " + block);
  return it->second;
}

std::string FactorChain::to_json() const {
  nlohmann::json j;
  j["blocks"] = blocks;
  nlohmann::json r = nlohmann::json::array();
  for (int i = 0; i < (int)blocks.size(); ++i)
    for (const auto& [k, v] : rates[i]) r.push_back({i, k, v});
  j["rates"] = std::move(r);
  j["pi"] = pi;
  j["holding"] = holding;
  j["dH"] = dH;
  return j.dump(2);
}

namespace {

FactorChain assemble(const std::vector<std::string>& block_names,
                     const std::vector<Row>& rows,
                     const std::vector<VertexId>& reps, bool has_height) {
  FactorChain fc;
  fc.blocks = block_names;
  fc.representative = reps;
  fc.has_height = has_height;
  for (int i = 0; i < (int)fc.blocks.size(); ++i) fc.index[fc.blocks[i]] = i;
  int n = (int)fc.blocks.size();
  fc.rates.resize(n);
  fc.exit.assign(n, 0.0);
  fc.holding.assign(n, 0.0);
  fc.dH.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double rate_dh = 0.0;
    for (const auto& [block, cell] : rows[i]) {
      auto it = fc.index.find(block);
      if (it == fc.index.end())
        throw NumericalError("block " + fc.blocks[i] +
                             " transitions into truncated block " + block +
                             "; enlarge the ball");
      fc.rates[i].emplace_back(it->second, cell.first);
      fc.exit[i] += cell.first;
      rate_dh += cell.second;
    }
    if (fc.exit[i] > 0.0) {
      fc.holding[i] = 1.0 / fc.exit[i];
      fc.dH[i] = rate_dh / fc.exit[i];
    }
  }
  return fc;
}

}  // namespace

FactorChain factor_chain(const FiniteNetwork& net, const PartitionKey& key,
                         const HeightFn& height, double tol) {
  LumpabilityReport rep = lumpability_check(net, key, tol, height);
  if (!rep.lumpable)
    throw RuleViolation("partition is not lumpable: " + rep.message());

  std::map<std::string, int> first_member;
  for (int i = 0; i < net.size(); ++i)
    if (!net.boundary[i]) first_member.try_emplace(key(net.vertices[i]), i);

  std::vector<std::string> names;
  std::vector<Row> rows;
  std::vector<VertexId> reps;
  for (const auto& [block, i] : first_member) {
    names.push_back(block);
    reps.push_back(net.vertices[i]);
    rows.push_back(row_of_network_state(net, i, key, height));
  }
  return assemble(names, rows, reps, height != nullptr);
}

FactorChain factor_chain_lazy(const Substrate& states, const PartitionKey& key,
                              const VertexId& start, const HeightFn& height,
                              double tol, int max_blocks, int verify_members) {
  std::map<std::string, VertexId> rep_of;
  std::map<std::string, Row> row_of;
  std::map<std::string, std::vector<VertexId>> checked;
  std::vector<std::pair<VertexId, std::string>> pending;
  std::deque<std::string> queue;

  std::string b0 = key(start);
  rep_of[b0] = start;
  checked[b0].push_back(start);
  queue.push_back(b0);

  while (!queue.empty()) {
    std::string block = queue.front();
    queue.pop_front();
    Row row = row_of_substrate_state(states, rep_of[block], key, height);
    for (const auto& [target, cell] : row) {
      (void)cell;
      if (rep_of.count(target)) continue;
      if ((int)rep_of.size() >= max_blocks)
        throw SizeError("factor extraction exceeded the block cap");
      // A concrete member of the target block reached by one move.
      for (const auto& e : states.neighbors(rep_of[block]))
        if (key(e.to) == target) {
          rep_of[target] = e.to;
          checked[target].push_back(e.to);
          break;
        }
      queue.push_back(target);
    }
    row_of[block] = std::move(row);
  }

  // Cross-check extra members encountered as move targets.
  for (const auto& [block, rep] : rep_of) {
    for (const auto& e : states.neighbors(rep)) {
      std::string tb = key(e.to);
      auto& done = checked[tb];
      if ((int)done.size() >= verify_members) continue;
      if (std::find(done.begin(), done.end(), e.to) != done.end()) continue;
      done.push_back(e.to);
      pending.emplace_back(e.to, tb);
    }
  }
  for (const auto& [member, block] : pending) {
    Row row = row_of_substrate_state(states, member, key, height);
    std::string where;
    double ra, rb;
    if (!rows_match(row_of[block], row, tol, &where, &ra, &rb))
      throw RuleViolation("partition is not lumpable: block " + block +
                          ": members " + rep_of[block] + " and " + member +
                          " send aggregate rates " + std::to_string(ra) +
                          " vs " + std::to_string(rb) + " into block " + where);
  }

  std::vector<std::string> names;
  std::vector<Row> rows;
  std::vector<VertexId> reps;
  for (const auto& [block, row] : row_of) {
    names.push_back(block);
    rows.push_back(row);
    reps.push_back(rep_of[block]);
  }
  return assemble(names, rows, reps, height != nullptr);
}

namespace {

Eigen::MatrixXd jump_matrix(const FactorChain& fc) {
  int n = (int)fc.blocks.size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (fc.exit[i] <= 0.0)
      throw NumericalError("frozen block in factor chain: " + fc.blocks[i]);
    for (const auto& [j, q] : fc.rates[i]) P(i, j) += q / fc.exit[i];
  }
  return P;
}

void check_irreducible_blocks(const FactorChain& fc) {
  int n = (int)fc.blocks.size();
  auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (int i = 0; i < n; ++i) {
        bool edge = false;
        const auto& adj = forward ? fc.rates[x] : fc.rates[i];
        int want = forward ? i : x;
        for (const auto& [j, q] : adj)
          if (j == want && q > 0.0) edge = true;
        if (edge && !seen[i]) {
          seen[i] = 1;
          queue.push_back(i);
        }
      }
    }
    return seen;
  };
  auto fwd = reach(true);
  auto bwd = reach(false);
  std::string outside;
  int count = 0;
  for (int i = 0; i < n; ++i)
    if (!fwd[i] || !bwd[i]) {
      if (count < 5) outside += (outside.empty() ? "" : ", ") + fc.blocks[i];
      ++count;
    }
  if (count > 0)
    throw NumericalError(
        "factor chain is reducible; blocks outside the component of " +
        fc.blocks[0] + ": " + outside);
}

}  // namespace

std::vector<double>& stationary(FactorChain& fc) {
  int n = (int)fc.blocks.size();
  if (n == 1) {
    fc.pi = {1.0};
    return fc.pi;
  }
  check_irreducible_blocks(fc);
  Eigen::MatrixXd P = jump_matrix(fc);
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[0] = 1.0;
  Eigen::VectorXd x = A.partialPivLu().solve(b);
  double sum = x.sum();
  if (std::abs(sum) < 1e-300)
    throw NumericalError("stationary solve degenerate");
  x /= sum;
  for (int i = 0; i < n; ++i) {
    if (x[i] < -1e-12)
      throw NumericalError("stationary solve produced negative mass");
    if (x[i] < 0.0) x[i] = 0.0;
  }
  Eigen::VectorXd r = P.transpose() * x - x;
  if (r.cwiseAbs().maxCoeff() > kStationaryTol)
    throw NumericalError("stationary residual exceeds tolerance");
  fc.pi.assign(x.data(), x.data() + n);
  return fc.pi;
}

SpeedReport exact_speed(FactorChain& fc) {
  SpeedReport rep;
  rep.provenance = "exact";
  bool any_moves = false;
  for (double e : fc.exit)
    if (e > 0.0) any_moves = true;
  if (!any_moves) {
    rep.provenance = "exact (frozen)";
    rep.mean_holding = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (!fc.has_height)
    throw ParameterError("exact speed needs a height functional");
  if (fc.pi.empty()) stationary(fc);
  double D = 0.0, T = 0.0;
  for (int i = 0; i < (int)fc.blocks.size(); ++i) {
    D += fc.pi[i] * fc.dH[i];
    T += fc.pi[i] * fc.holding[i];
  }
  rep.drift_per_jump = D;
  rep.mean_holding = T;
  rep.estimate = D / T;
  return rep;
}

double ksk_identity_check(FactorChain& fc, const std::vector<std::string>& B) {
  if (B.empty()) throw ParameterError("block set must be nonempty");
  if (fc.pi.empty()) stationary(fc);
  int n = (int)fc.blocks.size();
  std::vector<char> in_b(n, 0);
  for (const auto& name : B) in_b[fc.id_of(name)] = 1;
  Eigen::MatrixXd P = jump_matrix(fc);

  std::vector<int> rows, row_of(n, -1);
  for (int i = 0; i < n; ++i)
    if (!in_b[i]) {
      row_of[i] = (int)rows.size();
      rows.push_back(i);
    }
  int m = (int)rows.size();
  Eigen::VectorXd hit = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) A(r, c) -= P(rows[r], rows[c]);
    hit = A.partialPivLu().solve(Eigen::VectorXd::Ones(m));
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!in_b[i]) continue;
    double ret = 1.0;
    for (int r = 0; r < m; ++r) ret += P(i, rows[r]) * hit[r];
    total += fc.pi[i] * ret;
  }
  return std::abs(total - 1.0);
}

PartitionKey span_key(const Substrate& base) {
  return [base](const VertexId& addr) {
    Config legs = parse_config(addr);
    if (legs.size() != 2)
      throw ParameterError("span key is defined for 2-leg configs");
    return "span=" + std::to_string(base.dist_between(legs[0], legs[1]));
  };
}

PartitionKey tree_lk_key(const Substrate& base) {
  return [base](const VertexId& addr) {
    Config legs = parse_config(addr);
    if (legs.size() != 2)
      throw ParameterError("(l,k) key is defined for 2-leg configs");
    long long l = base.dist_between(legs[0], legs[1]);
    long long k = std::llabs(
        std::llround(base.height_of(legs[0]) - base.height_of(legs[1])));
    return "(" + std::to_string(l) + "," + std::to_string(k) + ")";
  };
}

}  // namespace spiderlab
