#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "tsmm/ippgda.hpp"
#include "tsmm/rng.hpp"

using namespace tsmm;

namespace {

// instance with only the quadratic terms active; couplings configurable
ProblemInstance plain_instance(double lb = -10.0, double ub = 10.0) {
  ProblemInstance inst;
  inst.dims = Dimensions{};
  inst.lb = lb;
  inst.ub = ub;
  inst.Q1 = DenseMatrix(3, 3);
  for (std::size_t i = 0; i < 3; ++i) inst.Q1(i, i) = 0.1;
  inst.S1 = DenseMatrix::identity(2);
  inst.O1 = DenseMatrix(3, 2);
  inst.d1 = Vector(3, 0.0);
  inst.t1 = Vector(2, 0.0);
  return inst;
}

// decoupled scenario with inactive constraints: saddle at the origin
Scenario inactive_scenario(const Dimensions& d) {
  Scenario s;
  s.Q2 = DenseMatrix::identity(d.n2);
  s.S2 = DenseMatrix::identity(d.m2);
  s.O2 = DenseMatrix(d.n2, d.m2);
  s.T = DenseMatrix(d.l2, d.n1);
  s.A = DenseMatrix(d.s2, d.m1);
  s.W = DenseMatrix(d.l2, d.n2);
  s.B = DenseMatrix(d.s2, d.m2);
  for (std::size_t i = 0; i < d.l2; ++i) s.W(i, i) = 1.0;
  for (std::size_t i = 0; i < d.s2; ++i) s.B(i, i) = 1.0;
  s.d2 = Vector(d.n2, 0.0);
  s.t2 = Vector(d.m2, 0.0);
  s.h = Vector(d.l2, 10.0);
  s.c = Vector(d.s2, 10.0);
  return s;
}

SaaProblem experiment_problem(double tau, std::size_t n, std::uint64_t seed) {
  Dimensions d;
  return make_saa_problem(generate_instance(d, tau, -10, 10, seed), n, seed + 1);
}

KktPoint point_with_pi(const Dimensions& d, Vector pi_x, Vector pi_y) {
  KktPoint p = KktPoint::zeros(d);
  p.pi_x = std::move(pi_x);
  p.pi_y = std::move(pi_y);
  return p;
}

}  // namespace

TEST_CASE("aggregate_gradients") {
  Dimensions d;
  Scenario s = inactive_scenario(d);

  SUBCASE("single scenario with T = I-like rows") {
    Scenario si = s;
    si.T = DenseMatrix(2, 3);
    si.T(0, 0) = 1.0;
    si.T(1, 1) = 1.0;
    auto [vx, vy] = aggregate_gradients({point_with_pi(d, {1, 2}, {0, 0})}, {si});
    CHECK(vx == Vector{1, 2, 0});
    CHECK(vy == Vector{0, 0});
  }

  SUBCASE("all multipliers zero") {
    auto [vx, vy] = aggregate_gradients({KktPoint::zeros(d), KktPoint::zeros(d)}, {s, s});
    CHECK(norm2(vx) == 0.0);
    CHECK(norm2(vy) == 0.0);
  }

  SUBCASE("averaging with sign flip on vy") {
    Scenario sa = s;
    sa.A = DenseMatrix::identity(2);
    auto [vx, vy] = aggregate_gradients(
        {point_with_pi(d, {0, 0}, {1, 0}), point_with_pi(d, {0, 0}, {3, 0})}, {sa, sa});
    CHECK(vy[0] == doctest::Approx(-2.0));
    CHECK(vy[1] == doctest::Approx(0.0));
  }
}

TEST_CASE("y_step") {
  const ProblemInstance inst = plain_instance();

  SUBCASE("zero gradient leaves y fixed") {
    const Vector y = y_step({0, 0, 0}, {0, 0}, {0, 0}, inst, 0.5);
    CHECK(norm2(y) == 0.0);
  }

  SUBCASE("exact ascent step on -0.5||y||^2") {
    const Vector y = y_step({0, 0, 0}, {1, 1}, {0, 0}, inst, 1.0);
    CHECK(y[0] == doctest::Approx(0.0));
    CHECK(y[1] == doctest::Approx(0.0));
  }

  SUBCASE("step bound as beta -> 0") {
    const Vector y1{0.3, -0.7};
    for (double beta : {1e-3, 1e-2, 0.1}) {
      const Vector y = y_step({1, 2, 3}, y1, {0.1, -0.2}, inst, beta);
      // gradient = O1^T x - S1 y - t1 + vy = -y + vy here
      const Vector g = {-y1[0] + 0.1, -y1[1] - 0.2};
      CHECK(norm2(vec_sub(y, y1)) <= beta * norm2(g) + 1e-12);
    }
  }
}

TEST_CASE("x_step") {
  const ProblemInstance inst = plain_instance();

  SUBCASE("pure l1 shrinkage when the smooth gradient vanishes") {
    ProblemInstance flat = inst;
    flat.Q1 = DenseMatrix(3, 3);  // kill the quadratic so w = 0
    const Vector x = x_step({2.0, -3.0, 0.5}, {0, 0}, {0, 0, 0}, flat, 0.25);
    CHECK(x[0] == doctest::Approx(1.75));
    CHECK(x[1] == doctest::Approx(-2.75));
    CHECK(x[2] == doctest::Approx(0.25));
  }

  SUBCASE("clamp at the box after shrinkage") {
    ProblemInstance flat = inst;
    flat.Q1 = DenseMatrix(3, 3);
    flat.d1 = {-19.0, 0, 0};  // w = -19, x - beta*w = 1 + 19 = 20
    const Vector x = x_step({1.0, 0, 0}, {0, 0}, {0, 0, 0}, flat, 1.0);
    CHECK(x[0] == doctest::Approx(10.0));
  }

  SUBCASE("closed form matches 1-d grid search") {
    CounterRng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
      const double beta = rng.uniform(0.01, 2.0);
      const double v = rng.uniform(-5.0, 5.0);
      double lo = rng.uniform(-4.0, 4.0);
      double hi = lo + rng.uniform(0.1, 4.0);  // includes lb > 0 and ub < 0 cases
      // prox of beta|x| + 0.5(x - v)^2 over [lo, hi]
      ProblemInstance p = plain_instance(lo, hi);
      p.Q1 = DenseMatrix(3, 3);
      p.d1 = {(rng.uniform(0, 1) - v), 0, 0};  // so that x1 - beta*w = v with x1, beta below
      // easier: call with x1 = v + beta*w where w = d1
      const double w = p.d1[0];
      const Vector x = x_step({v + beta * w, 0, 0}, {0, 0}, {0, 0, 0}, p, beta);
      // grid-search oracle
      double best = 1e300, bestx = lo;
      for (double g = lo; g <= hi + 1e-12; g += 1e-4) {
        const double val = beta * std::abs(g) + 0.5 * (g - v) * (g - v);
        if (val < best) {
          best = val;
          bestx = g;
        }
      }
      CHECK(std::abs(x[0] - bestx) <= 1e-3);
    }
  }
}

TEST_CASE("residual_value") {
  const ProblemInstance inst = plain_instance();

  SUBCASE("stationary point gives zero") {
    CHECK(residual_value({0, 0, 0}, {0, 0}, {0, 0, 0}, {0, 0}, inst) == doctest::Approx(0.0));
  }

  SUBCASE("x=0 with |w| <= 1 contributes nothing") {
    ProblemInstance p = inst;
    p.d1 = {0.5, 0, 0};  // w_0 = 0.5 at x = 0
    CHECK(residual_value({0, 0, 0}, {0, 0}, {0, 0, 0}, {0, 0}, p) == doctest::Approx(0.0));
  }

  SUBCASE("x=0 with w = 2 contributes 1") {
    ProblemInstance p = inst;
    p.d1 = {2.0, 0, 0};
    CHECK(residual_value({0, 0, 0}, {0, 0}, {0, 0, 0}, {0, 0}, p) == doctest::Approx(1.0));
  }

  SUBCASE("x=0 with w = -2 contributes 1 by symmetry") {
    ProblemInstance p = inst;
    p.d1 = {-2.0, 0, 0};
    CHECK(residual_value({0, 0, 0}, {0, 0}, {0, 0, 0}, {0, 0}, p) == doctest::Approx(1.0));
  }
}

TEST_CASE("run_ippgda on an already-stationary problem") {
  SaaProblem prob;
  prob.instance = plain_instance();
  prob.scenarios = {inactive_scenario(prob.instance.dims)};
  prob.instance.sigma_lb = 1.0;
  SolverConfig cfg;
  const IppgdaTrace trace = run_ippgda(prob, Vector(3, 0.0), Vector(2, 0.0), cfg);
  CHECK(trace.status == RunStatus::Converged);
  CHECK(trace.records.size() == 1);
  CHECK(trace.records[0].resval == doctest::Approx(0.0));
}

TEST_CASE("delta schedule arithmetic") {
  SolverConfig cfg;
  cfg.delta0 = 1e-2;
  cfg.delta_decay = 0.5;
  // delta^3 = 1e-2 * 0.5^3
  CHECK(cfg.delta0 * std::pow(cfg.delta_decay, 3) == doctest::Approx(1.25e-3));
}

TEST_CASE("run_ippgda on the experiment family") {
  const SaaProblem prob = experiment_problem(0.5, 20, 101);
  CounterRng rng(3);
  Vector x0(3), y0(2);
  for (double& v : x0) v = rng.uniform(7, 10);
  for (double& v : y0) v = rng.uniform(0, 1);
  SolverConfig cfg;
  const IppgdaTrace trace = run_ippgda(prob, x0, y0, cfg);
  CHECK(trace.status == RunStatus::Converged);
  CHECK(trace.records.back().resval <= 1e-4);

  SUBCASE("iterates stay in the box and schedules are monotone") {
    for (double v : trace.final_x1) {
      CHECK(v >= prob.instance.lb);
      CHECK(v <= prob.instance.ub);
    }
    for (std::size_t k = 1; k < trace.records.size(); ++k) {
      CHECK(trace.records[k].delta <= trace.records[k - 1].delta);
    }
  }

  SUBCASE("trace CSV has the fixed header") {
    const std::string csv = trace.to_csv();
    CHECK(csv.rfind("k,resval,delta,objective,newton_iters\n", 0) == 0);
  }

  SUBCASE("stationarity consistency under fresh tight re-solves") {
    // re-evaluate Res.val with cold-started second stages at 1e-12
    std::vector<KktPoint> fresh;
    for (const auto& scn : prob.scenarios) {
      fresh.push_back(semismooth_newton(scn, trace.final_x1, trace.final_y1,
                                        KktPoint::zeros(prob.instance.dims), 1e-12)
                          .point);
    }
    auto [vx, vy] = aggregate_gradients(fresh, prob.scenarios);
    const double r = residual_value(trace.final_x1, trace.final_y1, vx, vy, prob.instance);
    CHECK(std::abs(r - trace.records.back().resval) <= 1e-4);
  }
}

TEST_CASE("saa_objective") {
  SUBCASE("all-zero data gives zero") {
    SaaProblem prob;
    prob.instance = plain_instance();
    Scenario s = inactive_scenario(prob.instance.dims);
    prob.scenarios = {s};
    CHECK(saa_objective(Vector(3, 0.0), Vector(2, 0.0), prob, 1e-10) == doctest::Approx(0.0));
  }

  SUBCASE("decoupled toy adds the second-stage value") {
    SaaProblem prob;
    prob.instance = plain_instance();
    prob.instance.dims = Dimensions{1, 1, 1, 1, 1, 1};
    prob.instance.Q1 = DenseMatrix(1, 1, {0.1});
    prob.instance.S1 = DenseMatrix::identity(1);
    prob.instance.O1 = DenseMatrix(1, 1);
    prob.instance.d1 = {0.0};
    prob.instance.t1 = {0.0};
    Scenario s;
    s.Q2 = DenseMatrix(1, 1, {1.0});
    s.S2 = DenseMatrix(1, 1, {1.0});
    s.O2 = DenseMatrix(1, 1);
    s.T = DenseMatrix(1, 1);
    s.A = DenseMatrix(1, 1);
    s.W = DenseMatrix(1, 1, {1.0});
    s.B = DenseMatrix(1, 1, {1.0});
    s.d2 = {-1.0};
    s.t2 = {0.0};
    s.h = {0.1};
    s.c = {0.1};
    prob.scenarios = {s};
    // first-stage value at x=1, y=0: |1| - 0.05 + 0 = 0.95; second stage -0.095
    CHECK(saa_objective({1.0}, {0.0}, prob, 1e-12) == doctest::Approx(0.95 - 0.095));
  }

  SUBCASE("scenario order invariance") {
    SaaProblem prob = experiment_problem(0.5, 8, 55);
    const Vector x1{0.5, -0.5, 0.2}, y1{0.1, 0.3};
    const double a = saa_objective(x1, y1, prob, 1e-10);
    std::reverse(prob.scenarios.begin(), prob.scenarios.end());
    const double b = saa_objective(x1, y1, prob, 1e-10);
    CHECK(std::abs(a - b) <= 1e-12);
  }
}

TEST_CASE("inner_max") {
  SUBCASE("decoupled problem maximizes at zero") {
    SaaProblem prob;
    prob.instance = plain_instance();
    prob.scenarios = {inactive_scenario(prob.instance.dims)};
    prob.instance.sigma_lb = 1.0;
    const auto res = inner_max(Vector(3, 0.0), prob, 1e-8);
    CHECK(norm2(res.y1) <= 1e-7);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-6));
  }

  SUBCASE("matches closed-form linear solve with inactive second stage") {
    SaaProblem prob;
    prob.instance = plain_instance();
    CounterRng rng(41);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) prob.instance.O1(i, j) = rng.uniform(0, 1);
    prob.instance.t1 = {0.2, -0.1};
    prob.scenarios = {inactive_scenario(prob.instance.dims)};
    prob.instance.sigma_lb = 1.0;
    const Vector x1{1.0, -2.0, 0.5};
    const auto res = inner_max(x1, prob, 1e-9);
    // maximizer of psi_1 in y: S1 y = O1^T x - t1 (second stage contributes 0)
    const Vector rhs = vec_sub(prob.instance.O1.matvec_transpose(x1), prob.instance.t1);
    const Vector y_star = lu_solve(prob.instance.S1, rhs);
    CHECK(norm2(vec_sub(res.y1, y_star)) <= 1e-6);
  }

  SUBCASE("max dominance over random probes") {
    const SaaProblem prob = experiment_problem(0.5, 10, 77);
    const Vector x1{1.0, 0.5, -0.5};
    const auto res = inner_max(x1, prob, 1e-7);
    CounterRng rng(43);
    for (int probe = 0; probe < 50; ++probe) {
      Vector y(2);
      for (double& v : y) v = rng.uniform(-3.0, 3.0);
      CHECK(res.value >= saa_objective(x1, y, prob, 1e-10) - 1e-6);
    }
  }
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.delta_decay = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = SolverConfig{};
  cfg.resval_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = SolverConfig{};
  cfg.lambda_lb_mode = LambdaLbMode::Configured;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}
