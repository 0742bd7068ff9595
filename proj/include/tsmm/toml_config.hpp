#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmm/ippgda.hpp"
#include "tsmm/problem.hpp"

namespace tsmm {

enum class ExperimentKind { Single, Exp1, Exp2 };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Single;
  std::vector<double> tau_values = {0.1, 0.5};
  std::vector<std::size_t> n_values = {50};
  std::vector<std::pair<double, double>> boxes = {{-10.0, 10.0}};
  std::size_t num_instances = 5;
  std::size_t num_initial_points = 5;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
};

struct AppConfig {
  Dimensions dims;
  double tau = 0.5;
  double lb = -10.0;
  double ub = 10.0;
  SolverConfig solver;
  ExperimentSpec experiment;
};

// Loads a config file covering [dims], [instance], [solver] and [experiment]
// sections. Only the small TOML subset used by those sections is accepted
// (scalars, strings, flat arrays); unknown keys raise InvalidConfig.
AppConfig load_config(const std::string& path);
AppConfig parse_config_text(const std::string& text);

}  // namespace tsmm
