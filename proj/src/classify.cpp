#include "spiderlab/classify.hpp"

#include <algorithm>
#include <cmath>

#include "spiderlab/chain.hpp"

namespace spiderlab {

std::string to_string(ChainClass c) {
  switch (c) {
    case ChainClass::Transient: return "transient";
    case ChainClass::Recurrent: return "recurrent";
    case ChainClass::NullRecurrent: return "null_recurrent";
    case ChainClass::PositiveRecurrent: return "positive_recurrent";
    case ChainClass::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(Evidence e) {
  switch (e) {
    case Evidence::TransientEvidence: return "transient-evidence";
    case Evidence::RecurrentEvidence: return "recurrent-evidence";
    case Evidence::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict lamperti_classify(const DriftProfile& profile, double margin,
                          double window_frac) {
  if (profile.x.size() != profile.mu.size() || profile.x.size() < 4)
    throw ParameterError("drift profile too short");
  for (std::size_t i = 1; i < profile.x.size(); ++i)
    if (profile.x[i] <= profile.x[i - 1])
      throw ParameterError("profile points must be strictly increasing");
  for (double m : profile.mu)
    if (!(m >= -1.0 - 1e-12 && m <= 1.0 + 1e-12))
      throw ParameterError("drift values must lie in [-1, 1]");

  Verdict v;
  double xmax = profile.x.back();
  v.window_lo = xmax * window_frac;
  v.window_hi = xmax;
  double sum = 0.0;
  int count = 0;
  std::vector<std::size_t> window;
  for (std::size_t i = 0; i < profile.x.size(); ++i) {
    if (profile.x[i] < v.window_lo) continue;
    window.push_back(i);
    sum += 2.0 * profile.x[i] * profile.mu[i];
    ++count;
  }
  v.L = sum / count;
  for (std::size_t i : window)
    v.band =
        std::max(v.band, std::abs(2.0 * profile.x[i] * profile.mu[i] - v.L));

  if (v.band > 0.5) {
    v.klass = ChainClass::Inconclusive;
    v.evidence = "fit of 2x*mu(x) did not converge (band " +
                 std::to_string(v.band) + ")";
    return v;
  }

  const double eps = 1e-9;
  auto all_below_upper = [&]() {
    for (std::size_t i : window)
      if (profile.mu[i] > 1.0 / (2.0 * profile.x[i]) + eps) return false;
    return true;
  };
  auto all_in_null_band = [&]() {
    for (std::size_t i : window) {
      if (profile.mu[i] > eps) return false;
      if (profile.mu[i] < -1.0 / (2.0 * profile.x[i]) - eps) return false;
    }
    return true;
  };

  if (std::abs(v.L - 1.0) <= margin) {
    if (all_below_upper()) {
      v.klass = ChainClass::Recurrent;
      v.evidence = "L near +1; mu(x) <= 1/(2x) pointwise on the window";
    } else {
      v.klass = ChainClass::Inconclusive;
      v.evidence = "L within margin of +1 and pointwise bound fails";
    }
  } else if (std::abs(v.L + 1.0) <= margin) {
    if (all_in_null_band()) {
      v.klass = ChainClass::NullRecurrent;
      v.evidence = "L near -1; 0 >= mu(x) >= -1/(2x) pointwise on the window";
    } else {
      v.klass = ChainClass::Inconclusive;
      v.evidence = "L within margin of -1 and pointwise bound fails";
    }
  } else if (v.L > 1.0) {
    v.klass = ChainClass::Transient;
    v.evidence = "L > 1 + margin";
  } else if (v.L < -1.0) {
    v.klass = ChainClass::PositiveRecurrent;
    v.evidence = "L < -1 - margin";
  } else if (v.L >= 0.0) {
    v.klass = ChainClass::Recurrent;
    v.evidence = "0 <= L < 1 - margin";
  } else {
    v.klass = ChainClass::NullRecurrent;
    v.evidence = "-1 + margin < L < 0";
  }
  return v;
}

DriftProfile walk_drift_profile(const std::function<double(long long)>& up,
                                const std::vector<long long>& xs) {
  GenParams gp;
  gp.up_rate = up;
  Substrate sub = generate(Family::LampertiHalfline, gp);
  DriftProfile p;
  for (long long x : xs) {
    double total = 0.0, num = 0.0;
    VertexId addr = std::to_string(x);
    for (const auto& e : sub.neighbors(addr)) {
      long long dx = std::stoll(e.to) - x;
      total += e.forward;
      num += e.forward * (double)dx;
    }
    p.x.push_back((double)x);
    p.mu.push_back(num / total);
  }
  return p;
}

DriftProfile spider_drift_profile(const std::function<double(long long)>& up,
                                  int s, const std::vector<long long>& xs) {
  if (s != 2)
    throw ParameterError(
        "the stretched-line identification needs span s = 2");
  GenParams gp;
  gp.up_rate = up;
  Substrate base = generate(Family::LampertiHalfline, gp);
  Substrate configs =
      spider_substrate(base, ConfigRule::bounded_span(2, 2, true));
  DriftProfile p;
  auto drift_at = [&](const Config& cfg) {
    long long z = stretched_line_index(cfg);
    double total = 0.0, num = 0.0;
    for (const auto& e : configs.neighbors(config_address(cfg))) {
      long long dz = stretched_line_index(parse_config(e.to)) - z;
      total += e.forward;
      num += e.forward * (double)dz;
    }
    return num / total;
  };
  for (long long x : xs) {
    p.x.push_back((double)(2 * x));
    p.mu.push_back(drift_at({std::to_string(x), std::to_string(x + 1)}));
    p.x.push_back((double)(2 * x + 1));
    p.mu.push_back(drift_at({std::to_string(x), std::to_string(x + 2)}));
  }
  return p;
}

namespace {

Evidence curve_verdict(const std::vector<int>& radii,
                       const std::vector<double>& R, std::size_t last,
                       std::string* why) {
  int half_idx = -1;
  for (std::size_t i = 0; i < last; ++i)
    if (2 * radii[i] <= radii[last]) half_idx = (int)i;
  if (half_idx < 0) {
    *why = "radius list spans less than one octave";
    return Evidence::Inconclusive;
  }
  double inc = R[last] - R[half_idx];
  if (inc < 1e-4 * R[last]) {
    *why = "last-octave increment " + std::to_string(inc) +
           " below 1e-4 of R = " + std::to_string(R[last]);
    return Evidence::TransientEvidence;
  }
  if (inc >= 0.05 * R[last]) {
    *why = "last-octave increment " + std::to_string(inc) +
           " keeps growing relative to R = " + std::to_string(R[last]);
    return Evidence::RecurrentEvidence;
  }
  *why = "last-octave increment neither flat nor growing";
  return Evidence::Inconclusive;
}

}  // namespace

ResistanceCurve resistance_growth(const Substrate& sub,
                                  const std::vector<int>& radii) {
  if (radii.size() < 3) throw ParameterError("need at least 3 radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1])
      throw ParameterError("radii must be strictly increasing");

  ResistanceCurve curve;
  curve.radii = radii;
  for (int r : radii) {
    FiniteNetwork ball = materialize_ball(sub, sub.root, r);
    std::vector<int> d = distances_from(ball, ball.root);
    std::vector<VertexId> sphere;
    for (int i = 0; i < ball.size(); ++i)
      if (d[i] == r) sphere.push_back(ball.vertices[i]);
    if (sphere.empty())
      throw ParameterError("graph has no vertices at radius " +
                           std::to_string(r));
    curve.R.push_back(effective_resistance(ball, sub.root, sphere));
  }

  std::string why_full, why_prev;
  Evidence full = curve_verdict(radii, curve.R, radii.size() - 1, &why_full);
  Evidence prev = curve_verdict(radii, curve.R, radii.size() - 2, &why_prev);
  if (full == prev) {
    curve.verdict = full;
    curve.evidence = why_full + "; stable under dropping the largest radius";
  } else {
    curve.verdict = Evidence::Inconclusive;
    curve.evidence = "verdict not stable across radius doubling (" + why_full +
                     " vs " + why_prev + ")";
  }
  return curve;
}

DistortionReport distortion_scan(const Substrate& sub, const ConfigRule& rule,
                                 int radius, std::vector<VertexId> sites) {
  Config start = lined_start(sub, rule.k);
  if (!rule.admissible(start, sub))
    throw RuleViolation("lined start configuration is not admissible");

  SpiderNetwork spn = build_spider_network(sub, rule, start, radius);
  FiniteNetwork ball = materialize_ball(sub, sub.root, radius);
  std::vector<int> depth = distances_from(ball, ball.root);

  if (sites.empty()) {
    std::vector<VertexId> candidates;
    for (int i = 0; i < ball.size(); ++i)
      if (depth[i] <= radius - rule.s - 2) candidates.push_back(ball.vertices[i]);
    std::sort(candidates.begin(), candidates.end());
    std::size_t want = std::min<std::size_t>(12, candidates.size());
    for (std::size_t i = 0; i < want; ++i)
      sites.push_back(candidates[i * candidates.size() / want]);
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  }

  DistortionReport rep;
  rep.mapping = "lined-config embedding of " + sub.family;

  // Smallest-address interior config at each site.
  std::vector<VertexId> anchor(sites.size());
  for (std::size_t si = 0; si < sites.size(); ++si) {
    VertexId best;
    for (int i = 0; i < spn.net.size(); ++i) {
      if (spn.net.boundary[i]) continue;
      for (const auto& leg : parse_config(spn.net.vertices[i]))
        if (leg == sites[si] && (best.empty() || spn.net.vertices[i] < best))
          best = spn.net.vertices[i];
    }
    if (best.empty())
      throw NotFoundError("no interior configuration at site " + sites[si]);
    anchor[si] = best;
    ConfigDiameterReport cd = config_diameter(spn, sites[si]);
    rep.site_diameters.emplace_back(sites[si], cd.diameter);
    rep.truncated = rep.truncated || cd.truncated;
  }

  double alpha = 1.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<int> d_int =
        distances_from(spn.net, spn.net.id_of(anchor[i]), true);
    std::vector<int> d_all;
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      long long d = sub.dist_between(sites[i], sites[j]);
      // A single configuration can cover both sites; no distance to compare.
      if (d == 0 || anchor[i] == anchor[j]) continue;
      int ds = d_int[spn.net.id_of(anchor[j])];
      if (ds < 0) {
        if (d_all.empty()) d_all = distances_from(spn.net, spn.net.id_of(anchor[i]));
        ds = d_all[spn.net.id_of(anchor[j])];
        rep.truncated = true;
        if (ds < 0)
          throw NumericalError("anchor configurations mutually unreachable");
      }
      double ratio = (double)ds / (double)d;
      rep.ratios.push_back(ratio);
      alpha = std::max({alpha, ratio, 1.0 / ratio});
    }
  }
  rep.alpha = alpha;
  // alpha absorbs the worst multiplicative gap, so no additive slack remains.
  rep.beta = 0.0;
  return rep;
}

}  // namespace spiderlab
