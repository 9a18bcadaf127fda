#pragma once

#include <stdexcept>
#include <string>

#include "imopt/harness.hpp"

namespace imopt {

/// Malformed or inconsistent configuration. The message names the key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// YAML with the top-level keys seed, oracle, scenario, supervisor,
/// algorithms and output. Missing keys keep their defaults, unknown keys are
/// rejected. Each algorithm entry has name and kind, plus h / rho / model for
/// the plain solvers and an optional supervisor block merged over the
/// top-level one for P-SIMBO. Without an algorithms list the three default
/// algorithms are used.
ExperimentConfig parse_experiment_config(const std::string& yaml_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Resolved configuration in the same format, for provenance next to outputs.
std::string dump_experiment_config(const ExperimentConfig& config);

}  // namespace imopt
