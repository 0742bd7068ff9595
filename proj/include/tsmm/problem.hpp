#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsmm/linalg.hpp"

namespace tsmm {

struct Dimensions {
  std::size_t n1 = 3;
  std::size_t m1 = 2;
  std::size_t n2 = 4;
  std::size_t m2 = 3;
  std::size_t l2 = 2;
  std::size_t s2 = 2;

  std::size_t xi_dim() const {
    return n2 * (n2 + 1) / 2 + m2 * (m2 + 1) / 2 + l2 * n1 + s2 * m1 + n2 + m2 + n2 * m2 + l2 + s2;
  }
  void validate() const;
};

// All deterministic data of one randomly generated problem. Second-stage
// scenario data is produced from the bar-quantities here plus a noise draw.
struct ProblemInstance {
  Dimensions dims;

  DenseMatrix Q1, S1, O1;
  Vector d1, t1;
  double lb = -10.0, ub = 10.0;
  double tau = 0.5;
  double noise_scale = 0.1;

  DenseMatrix Qbar2, Sbar2, Obar2, Tbar, Abar;
  Vector dbar2, tbar2, hbar, cbar;

  // lower bound on the strong convexity/concavity modulus over the sampled
  // scenarios; set by strong_modulus() during SaaProblem assembly
  double sigma_lb = 0.0;
};

// One realized second-stage datum.
struct Scenario {
  DenseMatrix Q2, S2, O2, T, A, W, B;
  Vector d2, t2, h, c;
  Vector xi;  // the raw noise draw, retained for reproducibility
};

struct SaaProblem {
  ProblemInstance instance;
  std::vector<Scenario> scenarios;
  std::uint64_t seed = 0;
};

ProblemInstance generate_instance(const Dimensions& dims, double tau, double lb, double ub,
                                  std::uint64_t seed);

// Deterministic map from a raw noise vector to a scenario (no PD validation);
// exposed for tests that force xi = 0.
Scenario scenario_from_xi(const ProblemInstance& inst, const Vector& xi);

// Draws n scenarios from per-index derived streams; scenario k is identical
// whether n = k+1 or n > k+1 (prefix property). PD failures are resampled up
// to 100 attempts per index, then IndefiniteScenario is thrown.
std::vector<Scenario> sample_scenarios(const ProblemInstance& inst, std::size_t n,
                                       std::uint64_t seed);

double strong_modulus(const std::vector<Scenario>& scenarios);

// Assembles the SAA problem and certifies sigma_lb on the instance.
SaaProblem make_saa_problem(const ProblemInstance& inst, std::size_t n, std::uint64_t seed);

// JSON round trip for golden files and replication.
std::string saa_problem_to_json(const SaaProblem& prob);
SaaProblem saa_problem_from_json(const std::string& text);

}  // namespace tsmm
