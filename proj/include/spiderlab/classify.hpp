#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spiderlab/spider.hpp"
#include "spiderlab/substrate.hpp"

namespace spiderlab {

struct DriftProfile {
  std::vector<double> x;   // strictly increasing sample points
  std::vector<double> mu;  // jump-chain mean drift at each point
};

enum class ChainClass {
  Transient,
  Recurrent,
  NullRecurrent,
  PositiveRecurrent,
  Inconclusive,
};

std::string to_string(ChainClass c);

struct Verdict {
  ChainClass klass = ChainClass::Inconclusive;
  double L = 0.0;     // fitted limit of 2x * mu(x)
  double band = 0.0;  // max deviation of 2x * mu(x) from L on the fit window
  double window_lo = 0.0, window_hi = 0.0;
  std::string evidence;
};

// Drift-criterion classification: fit L = lim 2x mu(x) on the largest decade
// of sample points; boundary cases (|L -+ 1| <= margin) fall back to the
// pointwise one-sided conditions and are inconclusive when those fail too.
Verdict lamperti_classify(const DriftProfile& profile, double margin = 0.05,
                          double window_frac = 0.1);

// Jump-chain drift of the half-line walk with up rates q(x, x+1) = up(x).
DriftProfile walk_drift_profile(const std::function<double(long long)>& up,
                                const std::vector<long long>& xs);

// Jump-chain drift of the 2-leg span-2 spider on the half-line, evaluated at
// stretched-line states 2x and 2x+1 through the spider-graph machinery.
DriftProfile spider_drift_profile(const std::function<double(long long)>& up,
                                  int s, const std::vector<long long>& xs);

enum class Evidence { TransientEvidence, RecurrentEvidence, Inconclusive };

std::string to_string(Evidence e);

struct ResistanceCurve {
  std::vector<int> radii;
  std::vector<double> R;  // effective resistance root -> sphere of radius r
  Evidence verdict = Evidence::Inconclusive;
  std::string evidence;
};

// Resistance growth diagnostic; the verdict must be stable under dropping
// the largest radius, otherwise it is inconclusive. Evidence, not proof.
ResistanceCurve resistance_growth(const Substrate& sub,
                                  const std::vector<int>& radii);

struct DistortionReport {
  std::string mapping;
  std::vector<double> ratios;  // d_spider / d_substrate per sampled pair
  double alpha = 1.0;
  double beta = 0.0;
  std::vector<std::pair<VertexId, int>> site_diameters;
  bool truncated = false;
};

// Compares substrate distances with spider-graph distances between local
// configurations, and reports per-site configuration diameters.
DistortionReport distortion_scan(const Substrate& sub, const ConfigRule& rule,
                                 int radius,
                                 std::vector<VertexId> sites = {});

}  // namespace spiderlab
