#include "tsmm/ippgda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tsmm {

void SolverConfig::validate() const {
  if (delta_decay <= 0.0 || delta_decay >= 1.0) {
    throw InvalidConfig("SolverConfig: delta_decay must lie in (0, 1)");
  }
  if (resval_tol <= 0.0) throw InvalidConfig("SolverConfig: resval_tol must be positive");
  if (delta0 <= 0.0 || delta_floor <= 0.0) {
    throw InvalidConfig("SolverConfig: delta schedule values must be positive");
  }
  if (ls_ratio <= 0.0 || ls_ratio >= 0.5 || ls_backtrack <= 0.0 || ls_backtrack >= 1.0) {
    throw InvalidConfig("SolverConfig: line search parameters out of range");
  }
  if (lambda_lb_mode == LambdaLbMode::Configured && lambda_lb_value <= 0.0) {
    throw InvalidConfig("SolverConfig: configured lambda bound must be positive");
  }
}

std::string IppgdaTrace::to_csv() const {
  std::string out = "k,resval,delta,objective,newton_iters\n";
  char buf[160];
  for (const TraceRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g,%zu\n", r.k, r.resval, r.delta,
                  r.objective, r.newton_iters);
    out += buf;
  }
  return out;
}

std::pair<Vector, Vector> aggregate_gradients(const std::vector<KktPoint>& points,
                                              const std::vector<Scenario>& scns) {
  const std::size_t n = points.size();
  if (n == 0 || n != scns.size()) throw InvalidDims("aggregate_gradients: list size mismatch");
  Vector vx(scns[0].T.cols(), 0.0);
  Vector vy(scns[0].A.cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector tx = scns[i].T.matvec_transpose(points[i].pi_x);
    const Vector ay = scns[i].A.matvec_transpose(points[i].pi_y);
    for (std::size_t j = 0; j < vx.size(); ++j) vx[j] += tx[j];
    for (std::size_t j = 0; j < vy.size(); ++j) vy[j] += ay[j];
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (double& v : vx) v *= inv;
  for (double& v : vy) v *= -inv;
  return {vx, vy};
}

namespace {

// gradient of psi_1 w.r.t. y1: O1^T x1 - S1 y1 - t1
Vector y_gradient(const Vector& x1, const Vector& y1, const ProblemInstance& inst) {
  const Vector ox = inst.O1.matvec_transpose(x1);
  const Vector sy = inst.S1.matvec(y1);
  Vector g(y1.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = ox[i] - sy[i] - inst.t1[i];
  return g;
}

// gradient of psi_1 w.r.t. x1: -Q1 x1 + d1 + O1 y1
Vector x_gradient(const Vector& x1, const Vector& y1, const ProblemInstance& inst) {
  const Vector qx = inst.Q1.matvec(x1);
  const Vector oy = inst.O1.matvec(y1);
  Vector g(x1.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -qx[i] + inst.d1[i] + oy[i];
  return g;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double mid3(double a, double hi, double lo) { return std::min(std::max(a, lo), hi); }

double default_step(const ProblemInstance& inst) {
  return 0.1 / (1.0 + spectral_norm(inst.Q1) + spectral_norm(inst.O1) + spectral_norm(inst.S1));
}

double norm1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

Vector y_step(const Vector& x1, const Vector& y1, const Vector& vy, const ProblemInstance& inst,
              double beta_y) {
  const Vector g = y_gradient(x1, y1, inst);
  Vector out(y1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y1[i] + beta_y * (g[i] + vy[i]);
  return out;
}

Vector x_step(const Vector& x1, const Vector& y1, const Vector& vx, const ProblemInstance& inst,
              double beta_x) {
  const Vector g = x_gradient(x1, y1, inst);
  Vector out(x1.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = g[i] + vx[i];
    out[i] = mid3(soft_threshold(x1[i] - beta_x * w, beta_x), inst.ub, inst.lb);
  }
  return out;
}

double residual_value(const Vector& x1, const Vector& y1, const Vector& vx, const Vector& vy,
                      const ProblemInstance& inst) {
  const Vector gy = y_gradient(x1, y1, inst);
  double y_part = 0.0;
  for (std::size_t i = 0; i < gy.size(); ++i) {
    const double r = gy[i] + vy[i];
    y_part += r * r;
  }

  const Vector gx = x_gradient(x1, y1, inst);
  double x_part = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double w = gx[i] + vx[i];
    double eta;
    if (x1[i] < 0.0) {
      eta = -1.0;
    } else if (x1[i] > 0.0) {
      eta = 1.0;
    } else if (w > 1.0) {
      eta = -1.0;
    } else if (w < -1.0) {
      eta = 1.0;
    } else {
      eta = -w;
    }
    const double r = x1[i] - mid3(x1[i] - eta - w, inst.ub, inst.lb);
    x_part += r * r;
  }
  return std::sqrt(y_part) + std::sqrt(x_part);
}

IppgdaTrace run_ippgda(const SaaProblem& prob, const Vector& x0, const Vector& y0,
                       const SolverConfig& cfg) {
  cfg.validate();
  const ProblemInstance& inst = prob.instance;
  const std::size_t n = prob.scenarios.size();
  if (n == 0) throw InvalidConfig("run_ippgda: empty scenario list");
  for (double x : x0) {
    if (x < inst.lb || x > inst.ub) throw InvalidConfig("run_ippgda: x0 outside the box");
  }

  double abar = 0.0, tbar = 0.0;
  for (const Scenario& s : prob.scenarios) {
    abar = std::max(abar, spectral_norm(s.A));
    tbar = std::max(tbar, spectral_norm(s.T));
  }
  const double at_max = std::max(abar, tbar);

  double beta_x = cfg.beta_x > 0.0 ? cfg.beta_x : default_step(inst);
  double beta_y = cfg.beta_y > 0.0 ? cfg.beta_y : default_step(inst);

  NewtonConfig ncfg;
  ncfg.ls_ratio = cfg.ls_ratio;
  ncfg.ls_backtrack = cfg.ls_backtrack;

  IppgdaTrace trace;
  Vector x1 = x0;
  Vector y1 = y0;
  std::vector<KktPoint> warm(n, KktPoint::zeros(inst.dims));
  double eps_prev = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0;; ++k) {
    const double delta = std::max(cfg.delta0 * std::pow(cfg.delta_decay, static_cast<double>(k)),
                                  cfg.delta_floor);

    double sqrt_lambda;
    if (cfg.lambda_lb_mode == LambdaLbMode::Configured) {
      sqrt_lambda = std::sqrt(cfg.lambda_lb_value);
    } else {
      double smin = std::numeric_limits<double>::infinity();
      const std::size_t probes = std::min<std::size_t>(20, n);
      for (std::size_t p = 0; p < probes; ++p) {
        const DenseMatrix j = generalized_jacobian(warm[p], prob.scenarios[p], x1, y1);
        smin = std::min(smin, min_singular_value(j));
      }
      sqrt_lambda = 0.5 * smin;
    }

    double eps = std::min(cfg.newton_tol_cap, delta * sqrt_lambda / at_max);
    // the floor also guards the induced tolerance: below ~1e-12 the inner
    // Newton residual can stagnate at rounding level and never pass
    eps = std::max(eps, cfg.delta_floor);
    eps = std::min(eps, eps_prev);
    eps_prev = eps;

    std::size_t newton_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        NewtonReport rep = semismooth_newton(prob.scenarios[i], x1, y1, warm[i], eps, ncfg);
        warm[i] = rep.point;
        newton_total += rep.iterations;
      } catch (const std::runtime_error& e) {
        throw MaxIterations("run_ippgda: inner solve failed at outer iteration " +
                            std::to_string(k) + ", scenario " + std::to_string(i) + ": " +
                            e.what());
      }
    }

    auto [vx, vy] = aggregate_gradients(warm, prob.scenarios);
    const double resval = residual_value(x1, y1, vx, vy, inst);

    double obj = first_stage_value(x1, y1, inst);
    double second = 0.0;
    for (std::size_t i = 0; i < n; ++i) second += second_stage_value(warm[i], prob.scenarios[i]);
    obj += second / static_cast<double>(n);

    trace.records.push_back({k, resval, delta, obj, newton_total});

    if (resval <= cfg.resval_tol) {
      trace.status = RunStatus::Converged;
      break;
    }
    if (k >= cfg.max_outer_iters) {
      trace.status = RunStatus::MaxIters;
      break;
    }

    if (cfg.step_safeguard && k >= 50) {
      const double old = trace.records[k - 50].resval;
      if (resval > 10.0 * old) {
        beta_x *= 0.5;
        beta_y *= 0.5;
      }
    }

    // parallel (Jacobi) update: both steps use (x1^k, y1^k)
    Vector y_new = y_step(x1, y1, vy, inst, beta_y);
    if (cfg.y_box_enabled) {
      for (double& v : y_new) v = mid3(v, cfg.y_box_ub, cfg.y_box_lb);
    }
    Vector x_new = x_step(x1, y1, vx, inst, beta_x);
    x1 = std::move(x_new);
    y1 = std::move(y_new);
  }

  trace.final_x1 = x1;
  trace.final_y1 = y1;
  auto [vx, vy] = aggregate_gradients(warm, prob.scenarios);
  trace.final_vx = vx;
  trace.final_vy = vy;
  trace.final_warm_starts = warm;
  return trace;
}

double first_stage_value(const Vector& x1, const Vector& y1, const ProblemInstance& inst) {
  const Vector qx = inst.Q1.matvec(x1);
  const Vector sy = inst.S1.matvec(y1);
  const Vector oy = inst.O1.matvec(y1);
  return norm1(x1) - 0.5 * dot(x1, qx) + dot(inst.d1, x1) + dot(x1, oy) - 0.5 * dot(y1, sy) -
         dot(inst.t1, y1);
}

double saa_objective(const Vector& x1, const Vector& y1, const SaaProblem& prob, double tol) {
  if (tol <= 0.0) throw InvalidConfig("saa_objective: tol must be positive");
  double second = 0.0;
  for (const Scenario& scn : prob.scenarios) {
    const KktPoint mu0 = KktPoint::zeros(prob.instance.dims);
    const NewtonReport rep = semismooth_newton(scn, x1, y1, mu0, tol);
    second += second_stage_value(rep.point, scn);
  }
  return first_stage_value(x1, y1, prob.instance) +
         second / static_cast<double>(prob.scenarios.size());
}

InnerMaxResult inner_max(const Vector& x1, const SaaProblem& prob, double tol) {
  if (tol <= 0.0) throw InvalidConfig("inner_max: tol must be positive");
  const ProblemInstance& inst = prob.instance;
  const std::size_t n = prob.scenarios.size();

  double sigma = inst.sigma_lb;
  if (sigma <= 0.0) sigma = strong_modulus(prob.scenarios);

  double abar = 0.0;
  for (const Scenario& s : prob.scenarios) abar = std::max(abar, spectral_norm(s.A));
  // Lipschitz bound on the y1 gradient: smooth first-stage part plus the
  // multiplier map, whose sensitivity is at most ||A||^2 / sigma
  const double lip = spectral_norm(inst.S1) + abar * abar / sigma;
  const double step = 1.0 / lip;

  Vector y1 = Vector(inst.dims.m1, 0.0);
  std::vector<KktPoint> warm(n, KktPoint::zeros(inst.dims));
  const std::size_t cap = 10000;
  for (std::size_t it = 0; it < cap; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      warm[i] = semismooth_newton(prob.scenarios[i], x1, y1, warm[i], tol / 10.0).point;
    }
    auto [vx, vy] = aggregate_gradients(warm, prob.scenarios);
    (void)vx;
    Vector g = y_gradient(x1, y1, inst);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += vy[i];
    if (norm2(g) <= tol) {
      double second = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        second += second_stage_value(warm[i], prob.scenarios[i]);
      }
      InnerMaxResult res;
      res.y1 = y1;
      res.value = first_stage_value(x1, y1, inst) + second / static_cast<double>(n);
      return res;
    }
    for (std::size_t i = 0; i < y1.size(); ++i) y1[i] += step * g[i];
  }
  throw MaxIterations("inner_max: gradient ascent did not converge within cap");
}

}  // namespace tsmm
