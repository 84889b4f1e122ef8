// nelsonctl: run one named scenario from a JSON config and write its
// CSV/JSON artifacts plus a manifest.
//
// Exit status: 0 success, 2 invalid config, 3 numeric failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "nelson/errors.hpp"
#include "nelson/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Batch front-end for the Nelson diffusion toolkit"};
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  bool quiet = false;
  app.add_option("--config", config_path, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed, overrides the config");
  app.add_option("--grid", grid, "number of grid points, overrides the config");
  app.add_flag("--quiet", quiet, "print nothing on success");
  app.set_version_flag("--version", nelson::kVersion);
  CLI11_PARSE(app, argc, argv);

  nelson::ScenarioConfig cfg;
  try {
    std::ifstream in(config_path);
    const auto doc = nlohmann::json::parse(in);
    cfg = nelson::parse_config(doc, seed, grid);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return 2;
  } catch (const nelson::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    const auto art = nelson::run_scenario(cfg, out_dir);
    if (!quiet) {
      for (const auto& note : art.notes) std::cout << note << "\n";
      for (const auto& f : art.files) std::cout << "wrote " << f.string() << "\n";
    }
  } catch (const nelson::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error in scenario " << cfg.scenario << ": " << e.what() << "\n";
    return 3;
  }
  return 0;
}
