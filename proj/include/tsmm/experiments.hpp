#pragma once

#include <string>
#include <vector>

#include "tsmm/ippgda.hpp"
#include "tsmm/toml_config.hpp"

namespace tsmm {

struct RunRecord {
  std::string file;
  double tau = 0.0;
  std::size_t instance = 0;
  std::size_t init = 0;
  std::size_t n = 0;
  std::string box;
  std::string status;  // Converged | MaxIters | Error
  std::string error;
  std::size_t iterations = 0;
  double final_resval = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::size_t failures = 0;
};

// Documented seed derivation, so any single run can be reproduced alone:
//   exp1: instance = h(master,{10,ti,i}), scenarios = h(master,{11,ti,i}),
//         init point = h(master,{12,ti,i,p})
//   exp2: instance = h(master,{20,i}), scenarios = h(master,{21,i}),
//         init point = h(master,{22,i})     (box-independent, so both boxes
//         see common random numbers)
// with h = CounterRng::derive_key.

// Residual traces over (tau, instance, initial point); one trace CSV per run
// plus a manifest JSON.
ExperimentResult run_exp1(const ExperimentSpec& spec, const SolverConfig& cfg,
                          const Dimensions& dims = {});

// SAA convergence over (box, N) with nested scenario sampling: the scenario
// set for a smaller N is a prefix of the set for any larger N.
ExperimentResult run_exp2(const ExperimentSpec& spec, const SolverConfig& cfg,
                          const Dimensions& dims = {}, double tau = 0.5);

void write_manifest(const ExperimentResult& result, const std::string& path);

}  // namespace tsmm
