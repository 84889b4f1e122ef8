#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace nelson {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Validated scenario description. Physical units come from at most one of
/// hbar, D or sigma0 (together with m and omega); the others are derived.
struct ScenarioConfig {
  std::string scenario;
  nlohmann::json params = nlohmann::json::object();
  double grid_half_width = 8.0;  // L, in units of sigma0
  std::size_t n_points = 801;
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t n_samples = 11;
  std::uint64_t seed = 1;
  std::string output;

  double mass = 1.0;
  double hbar = 1.0;
  double omega = 1.0;

  double sigma0() const;
  double diffusion() const { return hbar / (2.0 * mass); }
  double param(const std::string& name) const;  // required; throws ConfigError
  double param_or(const std::string& name, double fallback) const;
  std::string text_param(const std::string& name, const std::string& fallback) const;
  std::vector<double> times() const;
  nlohmann::json echo() const;
};

/// Parses and validates a config document before any computation. Overrides
/// from the command line are applied first.
ScenarioConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed = {},
                            std::optional<std::size_t> grid_points = {});

struct ScenarioArtifacts {
  std::vector<std::filesystem::path> files;  // data files, then the manifest
  std::vector<std::string> notes;            // human-readable summary lines
};

/// Runs one scenario and writes its CSV/JSON artifacts and manifest into
/// out_dir. Reruns with the same config produce byte-identical files.
ScenarioArtifacts run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace nelson
