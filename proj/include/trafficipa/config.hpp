#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "trafficipa/controller.hpp"
#include "trafficipa/rate_processes.hpp"

namespace trafficipa {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything one experiment needs. Defaults reproduce the reference
/// setting: C = 1, 20 light cycles per control cycle, set point 0.3.
/// The cycle length lives in service.cycle_length; the control-cycle
/// horizon is always derived from it.
struct ExperimentConfig {
  int light_cycles = 20;
  ArrivalConfig arrival;
  ServiceConfig service{5.0, 62.0, 1.0};
  ControllerConfig controller;
  double theta_initial = 0.9;
  int n_control_cycles = 50;
  std::uint64_t seed = 1;
  bool warm_start = true;
  std::filesystem::path output_dir = ".";

  double cycle_length() const { return service.cycle_length; }
  double horizon() const { return light_cycles * service.cycle_length; }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Flat `key = value` text. Blank lines and `#` comments are ignored, keys
/// not present keep their defaults, unknown keys are rejected. Errors carry
/// the source name and line number.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config for the keys it understands.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace trafficipa
