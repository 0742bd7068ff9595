#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsmm/problem.hpp"
#include "tsmm/second_stage.hpp"

namespace tsmm {

enum class LambdaLbMode { Configured, Estimated };

struct SolverConfig {
  double beta_x = 0.0;  // <= 0 selects the default 0.1/(1+||Q1||+||O1||+||S1||)
  double beta_y = 0.0;

  double delta0 = 1e-2;
  double delta_decay = 0.5;
  double delta_floor = 1e-12;

  LambdaLbMode lambda_lb_mode = LambdaLbMode::Estimated;
  double lambda_lb_value = 0.0;  // lambda lower bound when Configured

  double newton_tol_cap = 1e-6;
  std::size_t max_outer_iters = 5000;
  double resval_tol = 1e-4;

  double ls_ratio = 0.25;
  double ls_backtrack = 0.5;

  bool step_safeguard = true;  // halve steps if Res.val grows 10x over 50 iters

  bool y_box_enabled = false;  // optional box constraint on y1
  double y_box_lb = 0.0;
  double y_box_ub = 0.0;

  std::uint64_t seed = 0;

  void validate() const;
};

enum class RunStatus { Converged, MaxIters };

struct TraceRecord {
  std::size_t k = 0;
  double resval = 0.0;
  double delta = 0.0;
  double objective = 0.0;
  std::size_t newton_iters = 0;
};

struct IppgdaTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::MaxIters;
  Vector final_x1, final_y1;
  Vector final_vx, final_vy;
  std::vector<KktPoint> final_warm_starts;

  // CSV with header k,resval,delta,objective,newton_iters
  std::string to_csv() const;
};

// Scenario-averaged inexact gradients from the solved KKT points:
// vx = mean T_i^T pi_x_i, vy = -mean A_i^T pi_y_i, in fixed scenario order.
std::pair<Vector, Vector> aggregate_gradients(const std::vector<KktPoint>& points,
                                              const std::vector<Scenario>& scns);

// One proximal ascent step in y1 (g is zero on all of R^m1).
Vector y_step(const Vector& x1, const Vector& y1, const Vector& vy, const ProblemInstance& inst,
              double beta_y);

// One proximal descent step in x1 through the l1 + box prox.
Vector x_step(const Vector& x1, const Vector& y1, const Vector& vx, const ProblemInstance& inst,
              double beta_x);

// First-order residual combining the y1 gradient norm and the distance of x1
// to its projected proximal fixed point.
double residual_value(const Vector& x1, const Vector& y1, const Vector& vx, const Vector& vy,
                      const ProblemInstance& inst);

IppgdaTrace run_ippgda(const SaaProblem& prob, const Vector& x0, const Vector& y0,
                       const SolverConfig& cfg);

// Sampled objective psi_N at (x1, y1); every scenario is solved fresh at tol.
double saa_objective(const Vector& x1, const Vector& y1, const SaaProblem& prob, double tol);

struct InnerMaxResult {
  Vector y1;
  double value = 0.0;  // Psi_N(x1) = ||x1||_1 + max over y1
};

// Gradient ascent on the strongly concave inner maximization.
InnerMaxResult inner_max(const Vector& x1, const SaaProblem& prob, double tol);

double first_stage_value(const Vector& x1, const Vector& y1, const ProblemInstance& inst);

}  // namespace tsmm
