#include "spiderlab/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spiderlab/chain.hpp"
#include "spiderlab/classify.hpp"
#include "spiderlab/csv.hpp"
#include "spiderlab/quotient.hpp"

namespace spiderlab {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  if (!obj.is_object()) throw ParameterError(ctx + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ParameterError("unknown key '" + it.key() + "' in " + ctx);
  }
}

std::pair<Family, GenParams> substrate_from_json(const json& j) {
  check_keys(j, {"family", "p", "q", "M", "a", "unit_rates", "n_max",
                 "segments", "drift"},
             "substrate");
  Family fam = family_from_string(j.at("family").get<std::string>());
  GenParams gp;
  if (j.contains("p")) gp.p = j["p"].get<double>();
  if (j.contains("q")) gp.q = j["q"].get<double>();
  if (j.contains("M")) gp.M = j["M"].get<int>();
  if (j.contains("a")) gp.a = j["a"].get<double>();
  if (j.contains("unit_rates")) gp.unit_rates = j["unit_rates"].get<bool>();
  if (j.contains("n_max")) gp.n_max = j["n_max"].get<int>();
  if (j.contains("segments"))
    gp.segments = j["segments"].get<std::vector<int>>();
  if (fam == Family::LampertiHalfline) {
    if (!j.contains("drift"))
      throw ParameterError(
          "lamperti_halfline needs 'drift' (mean drift coefficient c in c/x)");
    double c = j["drift"].get<double>();
    // mu(x) = c/x corresponds to up rate (x + c) / (2x).
    gp.up_rate = [c](long long x) { return (x + c) / (2.0 * x); };
  }
  return {fam, gp};
}

ConfigRule rule_from_json(const json& j) {
  check_keys(j, {"kind", "k", "s", "leftmost_first", "offsets"}, "rule");
  return ConfigRule::from_json(j.dump());
}

const char* kAnalysisTypes[] = {"build",       "simulate",  "speed-exact",
                                "speed-mc",    "classify",  "lumpability",
                                "resistance",  "distortion", "hitting"};

void validate_analysis(const json& a) {
  if (!a.is_object() || !a.contains("type"))
    throw ParameterError("each analysis needs a 'type'");
  std::string type = a["type"].get<std::string>();
  bool known = false;
  for (const char* t : kAnalysisTypes)
    if (type == t) known = true;
  if (!known) throw ParameterError("unknown analysis type: " + type);
  if (type == "build") check_keys(a, {"type", "radius"}, "build analysis");
  if (type == "simulate")
    check_keys(a, {"type", "n_jumps"}, "simulate analysis");
  if (type == "speed-exact")
    check_keys(a, {"type", "partition"}, "speed-exact analysis");
  if (type == "speed-mc")
    check_keys(a, {"type", "n_jumps", "replicas"}, "speed-mc analysis");
  if (type == "classify") check_keys(a, {"type", "x_max"}, "classify analysis");
  if (type == "lumpability")
    check_keys(a, {"type", "partition", "radius"}, "lumpability analysis");
  if (type == "resistance")
    check_keys(a, {"type", "radii"}, "resistance analysis");
  if (type == "distortion")
    check_keys(a, {"type", "radius", "sites"}, "distortion analysis");
  if (type == "hitting")
    check_keys(a, {"type", "targets", "from", "mode", "radius"},
               "hitting analysis");
}

}  // namespace

Scenario Scenario::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("scenario is not valid JSON: ") +
                         e.what());
  }
  check_keys(j, {"schema_version", "name", "substrate", "rule", "start",
                 "seed", "analyses"},
             "scenario");
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    throw ParameterError("scenario needs schema_version = 1");

  Scenario sc;
  sc.name = j.value("name", "scenario");
  auto [fam, gp] = substrate_from_json(j.at("substrate"));
  sc.family = fam;
  sc.params = gp;
  if (j.contains("rule")) {
    sc.rule = rule_from_json(j["rule"]);
    sc.has_rule = true;
  }
  if (j.contains("start"))
    sc.start = j["start"].get<std::vector<std::string>>();
  if (j.contains("seed")) {
    sc.seed = j["seed"].get<std::uint64_t>();
    sc.has_seed = true;
  }
  if (!j.contains("analyses") || !j["analyses"].is_array() ||
      j["analyses"].empty())
    throw ParameterError("scenario needs a nonempty 'analyses' array");
  for (const auto& a : j["analyses"]) {
    validate_analysis(a);
    std::string type = a["type"].get<std::string>();
    if ((type == "simulate" || type == "speed-mc") && !j.contains("seed"))
      throw ParameterError("stochastic analyses need a scenario seed");
  }
  sc.analyses_json = j["analyses"].dump();
  // Build the substrate once to surface parameter errors during validation.
  generate(sc.family, sc.params);
  return sc;
}

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

std::string out_path(const std::string& dir, const std::string& name,
                     const std::string& suffix) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / (name + "_" + suffix)).string();
}

PartitionKey partition_by_name(const std::string& name, const Substrate& base) {
  if (name == "span") return span_key(base);
  if (name == "tree_lk") return tree_lk_key(base);
  throw ParameterError("unknown partition: " + name + " (span, tree_lk)");
}

}  // namespace

void run_scenario(const Scenario& sc, const std::string& out_dir) {
  Substrate base = generate(sc.family, sc.params);
  Substrate walker = base;  // the process being analyzed
  Config start_cfg;
  std::string start_addr = base.root;
  if (sc.has_rule) {
    start_cfg = sc.start.empty() ? lined_start(base, sc.rule.k) : sc.start;
    if (!sc.rule.admissible(start_cfg, base))
      throw RuleViolation("start configuration is not admissible");
    start_cfg = sc.rule.canonicalize(start_cfg, base);
    walker = spider_substrate(base, sc.rule);
    start_addr = config_address(start_cfg);
  } else if (!sc.start.empty()) {
    if (sc.start.size() != 1)
      throw ParameterError("start without a rule must be a single vertex");
    start_addr = sc.start[0];
  }
  walker.root = start_addr;

  for (const auto& a : json::parse(sc.analyses_json)) {
    std::string type = a["type"].get<std::string>();
    if (type == "build") {
      int radius = a.value("radius", 8);
      FiniteNetwork net =
          sc.has_rule
              ? build_spider_network(base, sc.rule, start_cfg, radius).net
              : materialize_ball(base, base.root, radius);
      std::ofstream f(out_path(out_dir, sc.name, "network.json"),
                      std::ios::binary);
      f << net.to_json() << '\n';
    } else if (type == "simulate") {
      long long n = a.value("n_jumps", 10000LL);
      Trace tr = simulate(walker, start_addr, n, sc.seed);
      CsvWriter csv(out_path(out_dir, sc.name, "trace.csv"),
                    {"replica", "jump_index", "time", "state_address",
                     "height"});
      for (std::size_t i = 0; i < tr.states.size(); ++i)
        csv.row({"0", std::to_string(i), csv_num(tr.times[i]), tr.states[i],
                 walker.height ? csv_num(walker.height(tr.states[i])) : "nan"});
    } else if (type == "speed-exact") {
      if (!sc.has_rule) throw ParameterError("speed-exact needs a rule");
      PartitionKey key =
          partition_by_name(a.value("partition", "span"), base);
      FactorChain fc = factor_chain_lazy(walker, key, start_addr,
                                         walker.height);
      SpeedReport rep = exact_speed(fc);
      {
        std::ofstream f(out_path(out_dir, sc.name, "factor.json"),
                        std::ios::binary);
        f << fc.to_json() << '\n';
      }
      CsvWriter csv(out_path(out_dir, sc.name, "speed_exact.csv"),
                    {"label", "estimate", "stderr", "replicas", "n_jumps",
                     "seed"});
      csv.row({sc.name + ":" + rep.provenance, csv_num(rep.estimate), "0", "0",
               "0", "0"});
    } else if (type == "speed-mc") {
      long long n = a.value("n_jumps", 100000LL);
      int replicas = a.value("replicas", 16);
      SpeedReport rep = mc_speed(walker, start_addr, n, replicas, sc.seed);
      CsvWriter csv(out_path(out_dir, sc.name, "speed_mc.csv"),
                    {"label", "estimate", "stderr", "replicas", "n_jumps",
                     "seed"});
      csv.row({sc.name + ":mc", csv_num(rep.estimate), csv_num(rep.stderr_),
               std::to_string(rep.replicas), std::to_string(rep.n_jumps),
               std::to_string(rep.seed)});
    } else if (type == "classify") {
      if (sc.family != Family::LampertiHalfline)
        throw ParameterError("classify needs a lamperti_halfline substrate");
      long long x_max = a.value("x_max", 500LL);
      std::vector<long long> xs;
      for (long long x = 1; x <= x_max; ++x) xs.push_back(x);
      Verdict walk = lamperti_classify(walk_drift_profile(sc.params.up_rate, xs));
      Verdict spider =
          lamperti_classify(spider_drift_profile(sc.params.up_rate, 2, xs));
      CsvWriter csv(out_path(out_dir, sc.name, "verdicts.csv"),
                    {"chain", "L", "verdict"});
      csv.row({"walk", csv_num(walk.L), to_string(walk.klass)});
      csv.row({"spider_s2", csv_num(spider.L), to_string(spider.klass)});
    } else if (type == "lumpability") {
      if (!sc.has_rule) throw ParameterError("lumpability needs a rule");
      PartitionKey key =
          partition_by_name(a.value("partition", "span"), base);
      int radius = a.value("radius", sc.rule.s + 5);
      SpiderNetwork spn = build_spider_network(base, sc.rule, start_cfg, radius);
      LumpabilityReport rep =
          lumpability_check(spn.net, key, kLumpabilityTol, walker.height);
      std::ofstream f(out_path(out_dir, sc.name, "lumpability.txt"),
                      std::ios::binary);
      f << (rep.lumpable ? "lumpable" : "not lumpable: " + rep.message())
        << '\n';
    } else if (type == "resistance") {
      std::vector<int> radii = a.at("radii").get<std::vector<int>>();
      ResistanceCurve curve = resistance_growth(walker, radii);
      CsvWriter csv(out_path(out_dir, sc.name, "resistance.csv"),
                    {"radius", "R_eff"});
      for (std::size_t i = 0; i < curve.radii.size(); ++i)
        csv.row({std::to_string(curve.radii[i]), csv_num(curve.R[i])});
      csv.row({"verdict", to_string(curve.verdict)});
    } else if (type == "distortion") {
      if (!sc.has_rule) throw ParameterError("distortion needs a rule");
      int radius = a.value("radius", 16);
      std::vector<VertexId> sites;
      if (a.contains("sites"))
        sites = a["sites"].get<std::vector<std::string>>();
      DistortionReport rep = distortion_scan(base, sc.rule, radius, sites);
      CsvWriter csv(out_path(out_dir, sc.name, "distortion.csv"),
                    {"site", "config_diameter", "alpha", "beta", "truncated"});
      for (const auto& [site, diam] : rep.site_diameters)
        csv.row({site, std::to_string(diam), csv_num(rep.alpha),
                 csv_num(rep.beta), rep.truncated ? "1" : "0"});
    } else if (type == "hitting") {
      std::vector<VertexId> targets =
          a.at("targets").get<std::vector<std::string>>();
      int radius = a.value("radius", 16);
      FiniteNetwork net =
          sc.has_rule
              ? build_spider_network(base, sc.rule, start_cfg, radius).net
              : materialize_ball(base, base.root, radius);
      HittingMode mode = a.value("mode", std::string("hit")) == "return"
                             ? HittingMode::Return
                             : HittingMode::Hit;
      HittingTimeReport rep = hitting_times(net, targets, mode);
      std::string from = a.value("from", start_addr);
      int i = net.id_of(from);
      CsvWriter csv(out_path(out_dir, sc.name, "hitting.csv"),
                    {"from", "expected_steps", "expected_time", "residual"});
      csv.row({from, csv_num(rep.steps[i]), csv_num(rep.time[i]),
               csv_num(rep.residual)});
    }
  }
}

std::vector<PresetInfo> list_presets() {
  return {
      {"line-speed",
       "2-leg bounded-span spider on the biased line: exact vs closed-form vs "
       "Monte Carlo speed, s = 2..12",
       "~10 s"},
      {"tree-speed-decay",
       "2-leg spider on the unit-rate tree with an end (M=3): speed decay and "
       "stationary mass of equal-height blocks, s in {3,6,12,24,48}",
       "~5 s"},
      {"lamperti",
       "drift classification on the half-line with mean drift +-1/(2x): walk "
       "vs its 2-leg span-2 spider",
       "~5 s"},
      {"star-ergodicity",
       "hitting-time scaling on segments hanging off a hub (p/q = sqrt(2)): "
       "walk slope log(p/q), spider slope 2 log(p/q)",
       "~10 s"},
      {"tree-end-speed",
       "2-leg spider on the tree with an end (M=3, a=1/2): exact and Monte "
       "Carlo speed for s in {1,2,3}",
       "~15 s"},
      {"distortion-decorated-line",
       "per-site configuration diameters on the line with pendant vertices at "
       "powers of two (sites 12, 24, 48)",
       "~5 s"},
  };
}

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

void preset_line_speed(std::uint64_t seed, const std::string& dir) {
  GenParams gp;
  gp.p = 0.7;
  gp.q = 0.3;
  Substrate line = generate(Family::Line, gp);
  CsvWriter csv(out_path(dir, "line_speed", "table.csv"),
                {"s", "V_exact", "V_formula", "V_mc", "stderr"});
  for (int s = 2; s <= 12; ++s) {
    Substrate configs =
        spider_substrate(line, ConfigRule::bounded_span(2, s, true));
    FactorChain fc =
        factor_chain_lazy(configs, span_key(line), "0|1", configs.height);
    double v = exact_speed(fc).estimate;
    double formula = (gp.p - gp.q) * (1.0 - 1.0 / s);
    SpeedReport mc = mc_speed(configs, "0|1", 20000, 8, seed + s);
    csv.row({std::to_string(s), csv_num(v), csv_num(formula),
             csv_num(mc.estimate), csv_num(mc.stderr_)});
  }
}

void preset_tree_speed_decay(const std::string& dir) {
  GenParams gp;
  gp.M = 3;
  gp.unit_rates = true;
  Substrate tree = generate(Family::TreeWithEnd, gp);
  CsvWriter csv(out_path(dir, "tree_speed_decay", "table.csv"),
                {"s", "V", "Pi_equal_height", "ksk_residual"});
  for (int s : {3, 6, 12, 24, 48}) {
    Substrate configs =
        spider_substrate(tree, ConfigRule::bounded_span(2, s, true));
    Config start = lined_start(tree, 2);
    FactorChain fc = factor_chain_lazy(configs, tree_lk_key(tree),
                                       config_address(start), configs.height);
    double v = exact_speed(fc).estimate;
    std::vector<std::string> k0;
    double mass = 0.0;
    for (int i = 0; i < (int)fc.blocks.size(); ++i)
      if (fc.blocks[i].substr(fc.blocks[i].find(',')) == ",0)") {
        k0.push_back(fc.blocks[i]);
        mass += fc.pi[i];
      }
    double residual = ksk_identity_check(fc, k0);
    csv.row({std::to_string(s), csv_num(v), csv_num(mass), csv_num(residual)});
  }
}

void preset_lamperti(const std::string& dir) {
  std::vector<long long> xs;
  for (long long x = 1; x <= 500; ++x) xs.push_back(x);
  CsvWriter csv(out_path(dir, "lamperti", "verdicts.csv"),
                {"chain", "L", "verdict"});
  for (double c : {0.5, -0.5}) {
    auto up = [c](long long x) { return (x + c) / (2.0 * x); };
    Verdict walk = lamperti_classify(walk_drift_profile(up, xs));
    Verdict spider = lamperti_classify(spider_drift_profile(up, 2, xs));
    std::string tag = c > 0 ? "+1/(2x)" : "-1/(2x)";
    csv.row({"walk drift " + tag, csv_num(walk.L), to_string(walk.klass)});
    csv.row({"spider_s2 drift " + tag, csv_num(spider.L),
             to_string(spider.klass)});
  }
}

void preset_star_ergodicity(const std::string& dir) {
  double p = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
  double q = 1.0 / (1.0 + std::sqrt(2.0));
  std::vector<double> ns, walk_logs, spider_logs;
  CsvWriter csv(out_path(dir, "star_ergodicity", "table.csv"),
                {"N", "walk_expected_steps", "spider_expected_steps"});
  for (int n = 4; n <= 12; ++n) {
    GenParams gp;
    gp.p = p;
    gp.q = q;
    gp.segments = {n};
    Substrate star = generate(Family::StarOfSegments, gp);
    FiniteNetwork net = materialize_ball(star, "0", n + 2);
    double walk_steps =
        hitting_times(net, {"0"}, HittingMode::Hit)
            .steps[net.id_of(std::to_string(n) + ":1")];

    Config base_cfg{"0", std::to_string(n) + ":1"};
    SpiderNetwork spn = build_spider_network(
        star, ConfigRule::bounded_span(2, 2, true), base_cfg, n + 6);
    std::string target = config_address(spn.start);
    std::string from =
        config_address(spn.rule.canonicalize(
            {"0", std::to_string(n) + ":2"}, star));
    double spider_steps = hitting_times(spn.net, {target}, HittingMode::Hit)
                              .steps[spn.net.id_of(from)];

    csv.row({std::to_string(n), csv_num(walk_steps), csv_num(spider_steps)});
    ns.push_back(n);
    walk_logs.push_back(std::log(walk_steps));
    spider_logs.push_back(std::log(spider_steps));
  }
  CsvWriter slopes(out_path(dir, "star_ergodicity", "slopes.csv"),
                   {"chain", "slope", "target"});
  slopes.row({"walk", csv_num(ols_slope(ns, walk_logs)),
              csv_num(std::log(p / q))});
  slopes.row({"spider_s2", csv_num(ols_slope(ns, spider_logs)),
              csv_num(2.0 * std::log(p / q))});
}

void preset_tree_end_speed(std::uint64_t seed, const std::string& dir) {
  GenParams gp;
  gp.M = 3;
  gp.a = 0.5;
  Substrate tree = generate(Family::TreeWithEnd, gp);
  CsvWriter csv(out_path(dir, "tree_end_speed", "table.csv"),
                {"s", "V_exact", "V_mc", "stderr"});
  for (int s : {1, 2, 3}) {
    Substrate configs =
        spider_substrate(tree, ConfigRule::bounded_span(2, s, true));
    Config start = lined_start(tree, 2);
    FactorChain fc = factor_chain_lazy(configs, tree_lk_key(tree),
                                       config_address(start), configs.height);
    double v = exact_speed(fc).estimate;
    SpeedReport mc =
        mc_speed(configs, config_address(start), 20000, 8, seed + s);
    csv.row({std::to_string(s), csv_num(v), csv_num(mc.estimate),
             csv_num(mc.stderr_)});
  }
}

void preset_distortion_decorated(const std::string& dir) {
  Substrate dec = generate(Family::DecoratedLine, {});
  // Ordered legs: the diameter at a site includes the cost of swapping the
  // two legs, which needs a detour around the nearest pendant vertex.
  DistortionReport rep =
      distortion_scan(dec, ConfigRule::bounded_span(2, 2, false), 64,
                      {"12", "24", "48"});
  CsvWriter csv(out_path(dir, "distortion_decorated_line", "table.csv"),
                {"site", "config_diameter", "truncated"});
  for (const auto& [site, diam] : rep.site_diameters)
    csv.row({site, std::to_string(diam), rep.truncated ? "1" : "0"});
}

}  // namespace

void run_preset(const std::string& name, std::uint64_t seed,
                const std::string& out_dir) {
  if (name == "line-speed") return preset_line_speed(seed, out_dir);
  if (name == "tree-speed-decay") return preset_tree_speed_decay(out_dir);
  if (name == "lamperti") return preset_lamperti(out_dir);
  if (name == "star-ergodicity") return preset_star_ergodicity(out_dir);
  if (name == "tree-end-speed") return preset_tree_end_speed(seed, out_dir);
  if (name == "distortion-decorated-line")
    return preset_distortion_decorated(out_dir);
  throw ParameterError("unknown preset: " + name);
}

}  // namespace spiderlab
