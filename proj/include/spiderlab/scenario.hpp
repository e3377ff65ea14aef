#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spiderlab/spider.hpp"
#include "spiderlab/substrate.hpp"

namespace spiderlab {

// A validated experiment description (schema_version 1). Unknown keys are
// rejected everywhere, so misspelled options fail loudly.
struct Scenario {
  std::string name;
  Family family = Family::Line;
  GenParams params;
  bool has_rule = false;
  ConfigRule rule;
  Config start;  // empty = lined config from the root
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::string analyses_json;  // validated analysis list, serialized

  static Scenario from_json(const std::string& text);
  static Scenario from_file(const std::string& path);
};

// Executes the scenario's analyses in order, writing artifacts under
// out_dir. Throws ParameterError on validation problems and
// NumericalError / RuleViolation / SizeError on computation failures.
void run_scenario(const Scenario& sc, const std::string& out_dir);

struct PresetInfo {
  std::string name;
  std::string description;
  std::string expected_runtime;
};

std::vector<PresetInfo> list_presets();

void run_preset(const std::string& name, std::uint64_t seed,
                const std::string& out_dir);

}  // namespace spiderlab
