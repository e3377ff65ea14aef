#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spiderlab/common.hpp"
#include "spiderlab/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const spiderlab::ParameterError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiderlab: multi-leg walker construction and analysis"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (default: all cores)");

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "execute a scenario JSON file");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  std::string run_out = "out";
  run->add_option("--out", run_out, "output directory");

  std::string preset_name;
  std::uint64_t seed = 20260823;
  std::string preset_out = "out";
  auto* preset = app.add_subcommand("preset", "run a built-in experiment");
  preset->add_option("name", preset_name, "preset name")->required();
  preset->add_option("--seed", seed, "RNG seed");
  preset->add_option("--out", preset_out, "output directory");

  auto* list = app.add_subcommand("list-presets", "show available presets");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", validate_path, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) spiderlab::set_default_threads(threads);

  if (run->parsed())
    return guarded([&] {
      spiderlab::Scenario sc = spiderlab::Scenario::from_file(scenario_path);
      spiderlab::run_scenario(sc, run_out);
      std::cout << "scenario '" << sc.name << "' finished; artifacts in "
                << run_out << '\n';
    });

  if (preset->parsed())
    return guarded([&] {
      spiderlab::run_preset(preset_name, seed, preset_out);
      std::cout << "preset '" << preset_name << "' finished; artifacts in "
                << preset_out << '\n';
    });

  if (list->parsed())
    return guarded([&] {
      for (const auto& info : spiderlab::list_presets())
        std::cout << info.name << "\t" << info.expected_runtime << "\t"
                  << info.description << '\n';
    });

  if (validate->parsed())
    return guarded([&] {
      spiderlab::Scenario::from_file(validate_path);
      std::cout << "scenario is valid\n";
    });

  return kExitOk;
}
