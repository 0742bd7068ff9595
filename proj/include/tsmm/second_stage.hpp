#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsmm/problem.hpp"

namespace tsmm {

// Second-stage KKT variable mu = (x2, y2, pi_x, pi_y).
struct KktPoint {
  Vector x2, y2, pi_x, pi_y;

  static KktPoint zeros(const Dimensions& d) {
    return {Vector(d.n2, 0.0), Vector(d.m2, 0.0), Vector(d.l2, 0.0), Vector(d.s2, 0.0)};
  }
  Vector stacked() const;
  static KktPoint from_stacked(const Vector& v, std::size_t n2, std::size_t m2, std::size_t l2,
                               std::size_t s2);
};

struct NewtonConfig {
  double ls_ratio = 0.25;     // Armijo ratio, in (0, 1/2)
  double ls_backtrack = 0.5;  // backtracking factor, in (0, 1)
  std::size_t max_iters = 100;
};

struct NewtonReport {
  KktPoint point;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  std::vector<double> step_sizes;
  std::vector<double> residual_history;  // length iterations + 1

  std::string to_json_line(std::size_t scenario_index) const;
};

// Stacked KKT residual: stationarity in (x2, y2) plus the componentwise
// min(pi, slack) complementarity rows.
Vector kkt_residual(const KktPoint& mu, const Scenario& scn, const Vector& x1, const Vector& y1);

// One element of the Clarke Jacobian of the residual, with the branch matrix
// U chosen as u_ii = 1 when pi_i <= slack_i (ties take the pi branch).
DenseMatrix generalized_jacobian(const KktPoint& mu, const Scenario& scn, const Vector& x1,
                                 const Vector& y1);

// Damped semi-smooth Newton on the KKT system, globalized by backtracking on
// the merit 0.5*||H||^2. Throws MaxIterations past cfg.max_iters.
NewtonReport semismooth_newton(const Scenario& scn, const Vector& x1, const Vector& y1,
                               const KktPoint& mu0, double tol, const NewtonConfig& cfg = {});

// Independent projected-extragradient oracle for the same saddle point.
// Requires the (I, 0) structure of W and B; multipliers are recovered from
// the stationarity residuals.
KktPoint extragradient_oracle(const Scenario& scn, const Vector& x1, const Vector& y1, double tol);

// F2 evaluated at the saddle point.
double second_stage_value(const KktPoint& point, const Scenario& scn);

}  // namespace tsmm
