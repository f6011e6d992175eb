#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "shl/exponents.hpp"
#include "shl/radial_pde.hpp"

namespace shl {

/// Effective parameters of one experiment. Unset optionals fall back to the
/// experiment's own defaults.
struct ExperimentConfig {
  ProblemParams problem;
  SolverConfig solver;
  std::optional<double> t1;         ///< end of the snapshot window
  std::optional<double> window_lo;  ///< start of the fit window
  int per_decade = 6;               ///< snapshots per decade of t
  std::string kind;                 ///< experiment.kind (data kind or experiment name)
  std::optional<double> ell;
  std::optional<double> b;
  std::optional<double> k;
  std::optional<double> tolerance;  ///< relative slope tolerance
  std::optional<double> r_lo;
  std::optional<double> r_hi;
  std::optional<double> rho;
};

/// Applies one `section.key = value` setting. Throws ConfigError for an
/// unknown key or a malformed value.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads a plain-text config with [section] headers and key = value lines.
/// Throws ConfigError if the file is missing or malformed.
ExperimentConfig load_config(const std::filesystem::path& path);
void load_config_into(ExperimentConfig& config, const std::filesystem::path& path);

/// Every effective setting as section.key -> text (17 significant digits).
std::map<std::string, std::string> echo_config(const ExperimentConfig& config);

}  // namespace shl
