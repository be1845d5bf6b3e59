#pragma once

#include "gpe/driver.hpp"

#include <string>
#include <string_view>

namespace gpe {

enum class RunMode { multigrid, direct, both };

RunMode parse_mode(std::string_view text);
std::string_view to_string(RunMode mode);

/// One batch experiment, read from a `key = value` file.
struct RunConfig {
  int cells_per_axis = 0;
  int n_levels = 0;
  ProblemParams params;
  RunSettings settings;
  RunMode mode = RunMode::multigrid;
  std::string output_dir = ".";
  /// Residual tolerance of the one-level-finer reference solve (mode both).
  double reference_tol = 1e-11;

  int dim() const { return params.domain.dim; }
};

/// Parses and validates a config. Required keys: dim, cells_per_axis,
/// n_levels, zeta, gammas. Throws ConfigError naming the offending line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string &path);

/// Key reference printed by the CLI help.
std::string_view config_reference();

} // namespace gpe
