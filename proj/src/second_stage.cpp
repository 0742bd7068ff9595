#include "tsmm/second_stage.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace tsmm {

Vector KktPoint::stacked() const {
  Vector v;
  v.reserve(x2.size() + y2.size() + pi_x.size() + pi_y.size());
  v.insert(v.end(), x2.begin(), x2.end());
  v.insert(v.end(), y2.begin(), y2.end());
  v.insert(v.end(), pi_x.begin(), pi_x.end());
  v.insert(v.end(), pi_y.begin(), pi_y.end());
  return v;
}

KktPoint KktPoint::from_stacked(const Vector& v, std::size_t n2, std::size_t m2, std::size_t l2,
                                std::size_t s2) {
  KktPoint p;
  auto it = v.begin();
  p.x2.assign(it, it + n2);
  it += n2;
  p.y2.assign(it, it + m2);
  it += m2;
  p.pi_x.assign(it, it + l2);
  it += l2;
  p.pi_y.assign(it, it + s2);
  return p;
}

std::string NewtonReport::to_json_line(std::size_t scenario_index) const {
  nlohmann::json j{{"scenario", scenario_index},
                   {"iterations", iterations},
                   {"residual", residual_norm}};
  return j.dump();
}

namespace {

// gradient of F2 w.r.t. x2: Q2 x2 + d2 + O2 y2
Vector grad_x2(const Scenario& scn, const Vector& x2, const Vector& y2) {
  Vector g = scn.Q2.matvec(x2);
  const Vector oy = scn.O2.matvec(y2);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += scn.d2[i] + oy[i];
  return g;
}

// minus the gradient of F2 w.r.t. y2: S2 y2 + t2 - O2^T x2
Vector neg_grad_y2(const Scenario& scn, const Vector& x2, const Vector& y2) {
  Vector g = scn.S2.matvec(y2);
  const Vector ox = scn.O2.matvec_transpose(x2);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += scn.t2[i] - ox[i];
  return g;
}

Vector slack_x(const Scenario& scn, const Vector& x1, const Vector& x2) {
  const Vector tx = scn.T.matvec(x1);
  const Vector wx = scn.W.matvec(x2);
  Vector s(scn.h.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = scn.h[i] - tx[i] - wx[i];
  return s;
}

Vector slack_y(const Scenario& scn, const Vector& y1, const Vector& y2) {
  const Vector ay = scn.A.matvec(y1);
  const Vector by = scn.B.matvec(y2);
  Vector s(scn.c.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = scn.c[i] - ay[i] - by[i];
  return s;
}

}  // namespace

Vector kkt_residual(const KktPoint& mu, const Scenario& scn, const Vector& x1, const Vector& y1) {
  Vector r1 = grad_x2(scn, mu.x2, mu.y2);
  const Vector wpi = scn.W.matvec_transpose(mu.pi_x);
  for (std::size_t i = 0; i < r1.size(); ++i) r1[i] += wpi[i];

  Vector r2 = neg_grad_y2(scn, mu.x2, mu.y2);
  const Vector bpi = scn.B.matvec_transpose(mu.pi_y);
  for (std::size_t i = 0; i < r2.size(); ++i) r2[i] += bpi[i];

  const Vector sx = slack_x(scn, x1, mu.x2);
  const Vector sy = slack_y(scn, y1, mu.y2);

  Vector out;
  out.reserve(r1.size() + r2.size() + sx.size() + sy.size());
  out.insert(out.end(), r1.begin(), r1.end());
  out.insert(out.end(), r2.begin(), r2.end());
  for (std::size_t i = 0; i < sx.size(); ++i) out.push_back(std::min(mu.pi_x[i], sx[i]));
  for (std::size_t i = 0; i < sy.size(); ++i) out.push_back(std::min(mu.pi_y[i], sy[i]));
  return out;
}

DenseMatrix generalized_jacobian(const KktPoint& mu, const Scenario& scn, const Vector& x1,
                                 const Vector& y1) {
  const std::size_t n2 = mu.x2.size();
  const std::size_t m2 = mu.y2.size();
  const std::size_t l2 = mu.pi_x.size();
  const std::size_t s2 = mu.pi_y.size();
  const std::size_t nm = n2 + m2;
  const std::size_t ls = l2 + s2;

  // M2 = blockdiag(W, B), branch matrix U from pi vs. slack
  DenseMatrix m2mat(ls, nm);
  for (std::size_t i = 0; i < l2; ++i)
    for (std::size_t j = 0; j < n2; ++j) m2mat(i, j) = scn.W(i, j);
  for (std::size_t i = 0; i < s2; ++i)
    for (std::size_t j = 0; j < m2; ++j) m2mat(l2 + i, n2 + j) = scn.B(i, j);

  const Vector sx = slack_x(scn, x1, mu.x2);
  const Vector sy = slack_y(scn, y1, mu.y2);
  Vector u(ls);
  for (std::size_t i = 0; i < l2; ++i) u[i] = (mu.pi_x[i] <= sx[i]) ? 1.0 : 0.0;
  for (std::size_t i = 0; i < s2; ++i) u[l2 + i] = (mu.pi_y[i] <= sy[i]) ? 1.0 : 0.0;

  DenseMatrix j(nm + ls, nm + ls);
  // M1 = [[Q2, O2], [-O2^T, S2]]
  for (std::size_t r = 0; r < n2; ++r) {
    for (std::size_t c = 0; c < n2; ++c) j(r, c) = scn.Q2(r, c);
    for (std::size_t c = 0; c < m2; ++c) j(r, n2 + c) = scn.O2(r, c);
  }
  for (std::size_t r = 0; r < m2; ++r) {
    for (std::size_t c = 0; c < n2; ++c) j(n2 + r, c) = -scn.O2(c, r);
    for (std::size_t c = 0; c < m2; ++c) j(n2 + r, n2 + c) = scn.S2(r, c);
  }
  // M2^T top-right, (U - I) M2 bottom-left, U bottom-right
  for (std::size_t r = 0; r < nm; ++r)
    for (std::size_t c = 0; c < ls; ++c) j(r, nm + c) = m2mat(c, r);
  for (std::size_t r = 0; r < ls; ++r) {
    const double f = u[r] - 1.0;
    for (std::size_t c = 0; c < nm; ++c) j(nm + r, c) = f * m2mat(r, c);
    j(nm + r, nm + r) = u[r];
  }
  return j;
}

NewtonReport semismooth_newton(const Scenario& scn, const Vector& x1, const Vector& y1,
                               const KktPoint& mu0, double tol, const NewtonConfig& cfg) {
  const std::size_t n2 = mu0.x2.size();
  const std::size_t m2 = mu0.y2.size();
  const std::size_t l2 = mu0.pi_x.size();
  const std::size_t s2 = mu0.pi_y.size();

  NewtonReport rep;
  rep.point = mu0;
  Vector h = kkt_residual(rep.point, scn, x1, y1);
  double hnorm = norm2(h);
  rep.residual_history.push_back(hnorm);

  while (hnorm > tol) {
    if (rep.iterations >= cfg.max_iters) {
      throw MaxIterations("semismooth_newton: residual " + std::to_string(hnorm) +
                          " above tolerance after " + std::to_string(cfg.max_iters) +
                          " iterations");
    }
    const DenseMatrix g = generalized_jacobian(rep.point, scn, x1, y1);
    Vector rhs = vec_scale(-1.0, h);
    Vector d;
    try {
      d = lu_solve(g, rhs);
    } catch (const SingularMatrix& e) {
      throw SingularMatrix(std::string(e.what()) + " at Newton iterate with residual " +
                           std::to_string(hnorm));
    }

    const double theta0 = 0.5 * hnorm * hnorm;
    const Vector mu_vec = rep.point.stacked();
    double alpha = 1.0;
    KktPoint trial;
    Vector h_trial;
    double h_trial_norm = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      Vector cand = mu_vec;
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] += alpha * d[i];
      trial = KktPoint::from_stacked(cand, n2, m2, l2, s2);
      h_trial = kkt_residual(trial, scn, x1, y1);
      h_trial_norm = norm2(h_trial);
      if (0.5 * h_trial_norm * h_trial_norm <= (1.0 - 2.0 * cfg.ls_ratio * alpha) * theta0) break;
      alpha *= cfg.ls_backtrack;
    }

    rep.point = trial;
    h = h_trial;
    hnorm = h_trial_norm;
    rep.step_sizes.push_back(alpha);
    rep.residual_history.push_back(hnorm);
    ++rep.iterations;
  }
  rep.residual_norm = hnorm;
  return rep;
}

KktPoint extragradient_oracle(const Scenario& scn, const Vector& x1, const Vector& y1,
                              double tol) {
  const std::size_t n2 = scn.Q2.rows();
  const std::size_t m2 = scn.S2.rows();
  const std::size_t l2 = scn.h.size();
  const std::size_t s2 = scn.c.size();

  // requires the structured W = (I, 0), B = (I, 0) so that projections are
  // componentwise upper bounds on the leading coordinates
  auto is_eye_zero = [](const DenseMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) != (i == j ? 1.0 : 0.0)) return false;
    return true;
  };
  if (!is_eye_zero(scn.W) || !is_eye_zero(scn.B)) {
    throw InvalidConfig("extragradient_oracle: requires structured (I, 0) constraint matrices");
  }

  const Vector ub_x = [&] {
    const Vector tx = scn.T.matvec(x1);
    Vector u(l2);
    for (std::size_t i = 0; i < l2; ++i) u[i] = scn.h[i] - tx[i];
    return u;
  }();
  const Vector ub_y = [&] {
    const Vector ay = scn.A.matvec(y1);
    Vector u(s2);
    for (std::size_t i = 0; i < s2; ++i) u[i] = scn.c[i] - ay[i];
    return u;
  }();

  auto project = [&](Vector& x2, Vector& y2) {
    for (std::size_t i = 0; i < l2; ++i) x2[i] = std::min(x2[i], ub_x[i]);
    for (std::size_t i = 0; i < s2; ++i) y2[i] = std::min(y2[i], ub_y[i]);
  };

  // saddle operator (grad_x F2, -grad_y F2); its linear part is M1
  DenseMatrix m1(n2 + m2, n2 + m2);
  for (std::size_t r = 0; r < n2; ++r) {
    for (std::size_t c = 0; c < n2; ++c) m1(r, c) = scn.Q2(r, c);
    for (std::size_t c = 0; c < m2; ++c) m1(r, n2 + c) = scn.O2(r, c);
  }
  for (std::size_t r = 0; r < m2; ++r) {
    for (std::size_t c = 0; c < n2; ++c) m1(n2 + r, c) = -scn.O2(c, r);
    for (std::size_t c = 0; c < m2; ++c) m1(n2 + r, n2 + c) = scn.S2(r, c);
  }
  const double step = 0.5 / spectral_norm(m1);

  auto recover = [&](const Vector& x2, const Vector& y2) {
    KktPoint p;
    p.x2 = x2;
    p.y2 = y2;
    const Vector gx = grad_x2(scn, x2, y2);
    const Vector gy = neg_grad_y2(scn, x2, y2);
    p.pi_x.assign(l2, 0.0);
    p.pi_y.assign(s2, 0.0);
    for (std::size_t i = 0; i < l2; ++i) p.pi_x[i] = std::max(0.0, -gx[i]);
    for (std::size_t i = 0; i < s2; ++i) p.pi_y[i] = std::max(0.0, -gy[i]);
    return p;
  };

  Vector x2(n2, 0.0), y2(m2, 0.0);
  project(x2, y2);
  const std::size_t cap = 1000000;
  for (std::size_t it = 0; it < cap; ++it) {
    Vector hx = x2, hy = y2;
    {
      const Vector gx = grad_x2(scn, x2, y2);
      const Vector gy = neg_grad_y2(scn, x2, y2);
      for (std::size_t i = 0; i < n2; ++i) hx[i] -= step * gx[i];
      for (std::size_t i = 0; i < m2; ++i) hy[i] -= step * gy[i];
      project(hx, hy);
    }
    Vector nx = x2, ny = y2;
    {
      const Vector gx = grad_x2(scn, hx, hy);
      const Vector gy = neg_grad_y2(scn, hx, hy);
      for (std::size_t i = 0; i < n2; ++i) nx[i] -= step * gx[i];
      for (std::size_t i = 0; i < m2; ++i) ny[i] -= step * gy[i];
      project(nx, ny);
    }
    double move = 0.0;
    for (std::size_t i = 0; i < n2; ++i) move += (nx[i] - x2[i]) * (nx[i] - x2[i]);
    for (std::size_t i = 0; i < m2; ++i) move += (ny[i] - y2[i]) * (ny[i] - y2[i]);
    x2 = nx;
    y2 = ny;
    if (std::sqrt(move) <= tol) {
      KktPoint p = recover(x2, y2);
      if (norm2(kkt_residual(p, scn, x1, y1)) <= 10.0 * tol) return p;
    }
  }
  throw MaxIterations("extragradient_oracle: no convergence within cap");
}

double second_stage_value(const KktPoint& point, const Scenario& scn) {
  const Vector& x2 = point.x2;
  const Vector& y2 = point.y2;
  const Vector qx = scn.Q2.matvec(x2);
  const Vector sy = scn.S2.matvec(y2);
  const Vector oy = scn.O2.matvec(y2);
  return 0.5 * dot(x2, qx) + dot(scn.d2, x2) + dot(x2, oy) - 0.5 * dot(y2, sy) -
         dot(scn.t2, y2);
}

}  // namespace tsmm
