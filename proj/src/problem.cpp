#include "tsmm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "tsmm/rng.hpp"

namespace tsmm {

namespace {

// stream ids under one master seed
constexpr std::uint64_t kInstanceStream = 0;
constexpr std::uint64_t kScenarioStream = 1;

DenseMatrix random_matrix(CounterRng& rng, std::size_t r, std::size_t c, double lo, double hi) {
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

Vector random_vector(CounterRng& rng, std::size_t n, double lo, double hi) {
  Vector v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// (I, 0) block used for both W and B in the experiment family
DenseMatrix eye_zero(std::size_t rows, std::size_t cols) {
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) m(i, i) = 1.0;
  return m;
}

// fill a symmetric matrix from upper-triangle entries, row-major incl. diagonal
DenseMatrix symmetric_from_upper(std::size_t n, const Vector& vals, std::size_t& pos) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      m(i, j) = vals[pos];
      m(j, i) = vals[pos];
      ++pos;
    }
  return m;
}

DenseMatrix matrix_from_flat(std::size_t r, std::size_t c, const Vector& vals, std::size_t& pos) {
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = vals[pos++];
  return m;
}

Vector vector_from_flat(std::size_t n, const Vector& vals, std::size_t& pos) {
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = vals[pos++];
  return v;
}

DenseMatrix add_scaled(const DenseMatrix& a, double s, const DenseMatrix& b) {
  DenseMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += s * b(i, j);
  return out;
}

Vector add_scaled(const Vector& a, double s, const Vector& b) {
  Vector out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += s * b[i];
  return out;
}

}  // namespace

void Dimensions::validate() const {
  if (n1 == 0 || m1 == 0 || n2 == 0 || m2 == 0 || l2 == 0 || s2 == 0) {
    throw InvalidDims("Dimensions: all dimensions must be positive");
  }
  if (l2 > n2 || s2 > m2) {
    throw InvalidDims("Dimensions: (I, 0) structure requires l2 <= n2 and s2 <= m2");
  }
}

ProblemInstance generate_instance(const Dimensions& dims, double tau, double lb, double ub,
                                  std::uint64_t seed) {
  dims.validate();
  if (tau <= 0.0) throw InvalidConfig("generate_instance: tau must be positive");
  if (lb >= ub) throw InvalidConfig("generate_instance: lb must be below ub");

  CounterRng rng(CounterRng::derive_key(seed, {kInstanceStream}));

  ProblemInstance inst;
  inst.dims = dims;
  inst.tau = tau;
  inst.lb = lb;
  inst.ub = ub;
  inst.noise_scale = 0.1;

  inst.Q1 = DenseMatrix(dims.n1, dims.n1);
  for (std::size_t i = 0; i < dims.n1; ++i) inst.Q1(i, i) = 0.1;
  inst.S1 = DenseMatrix::identity(dims.m1);

  // draw order is fixed: O1, d1, t1, Obar2, Tbar, Abar, dbar2, tbar2
  inst.O1 = random_matrix(rng, dims.n1, dims.m1, 0.0, 1.0);
  inst.d1 = random_vector(rng, dims.n1, 0.0, 1.0);
  inst.t1 = random_vector(rng, dims.m1, 0.0, 1.0);

  Vector qdiag(dims.n2);
  for (std::size_t i = 0; i < dims.n2; ++i) qdiag[i] = static_cast<double>(i + 1);
  inst.Qbar2 = DenseMatrix::diag(qdiag);
  inst.Sbar2 = DenseMatrix::identity(dims.m2);
  inst.hbar = Vector(dims.l2, 0.1);
  inst.cbar = Vector(dims.s2, 0.1);

  inst.Obar2 = random_matrix(rng, dims.n2, dims.m2, 0.0, 1.0);
  inst.Tbar = random_matrix(rng, dims.l2, dims.n1, 0.0, 1.0);
  inst.Abar = random_matrix(rng, dims.s2, dims.m1, 0.0, 1.0);
  inst.dbar2 = random_vector(rng, dims.n2, 0.0, 1.0);
  inst.tbar2 = random_vector(rng, dims.m2, 0.0, 1.0);
  return inst;
}

Scenario scenario_from_xi(const ProblemInstance& inst, const Vector& xi) {
  const Dimensions& d = inst.dims;
  if (xi.size() != d.xi_dim()) throw InvalidDims("scenario_from_xi: xi length mismatch");

  // fixed unpack order: Q~2, S~2, T~, A~, d~2, t~2, O~2, h~, c~
  std::size_t pos = 0;
  const DenseMatrix Qt = symmetric_from_upper(d.n2, xi, pos);
  const DenseMatrix St = symmetric_from_upper(d.m2, xi, pos);
  const DenseMatrix Tt = matrix_from_flat(d.l2, d.n1, xi, pos);
  const DenseMatrix At = matrix_from_flat(d.s2, d.m1, xi, pos);
  const Vector dt = vector_from_flat(d.n2, xi, pos);
  const Vector tt = vector_from_flat(d.m2, xi, pos);
  const DenseMatrix Ot = matrix_from_flat(d.n2, d.m2, xi, pos);
  const Vector ht = vector_from_flat(d.l2, xi, pos);
  const Vector ct = vector_from_flat(d.s2, xi, pos);

  const double ns = inst.noise_scale;
  Scenario scn;
  scn.Q2 = add_scaled(DenseMatrix(d.n2, d.n2), inst.tau, inst.Qbar2);
  scn.Q2 = add_scaled(scn.Q2, ns, Qt);
  scn.S2 = add_scaled(DenseMatrix(d.m2, d.m2), inst.tau, inst.Sbar2);
  scn.S2 = add_scaled(scn.S2, ns, St);
  scn.O2 = add_scaled(inst.Obar2, ns, Ot);
  scn.T = add_scaled(inst.Tbar, ns, Tt);
  scn.A = add_scaled(inst.Abar, ns, At);
  scn.d2 = add_scaled(inst.dbar2, ns, dt);
  scn.t2 = add_scaled(inst.tbar2, ns, tt);
  scn.h = add_scaled(inst.hbar, ns, ht);
  scn.c = add_scaled(inst.cbar, ns, ct);
  scn.W = eye_zero(d.l2, d.n2);
  scn.B = eye_zero(d.s2, d.m2);
  scn.xi = xi;
  return scn;
}

std::vector<Scenario> sample_scenarios(const ProblemInstance& inst, std::size_t n,
                                       std::uint64_t seed) {
  std::vector<Scenario> out;
  out.reserve(n);
  const std::size_t xd = inst.dims.xi_dim();
  for (std::size_t i = 0; i < n; ++i) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < 100; ++attempt) {
      CounterRng rng(CounterRng::derive_key(seed, {kScenarioStream, i, attempt}));
      Vector xi(xd);
      for (double& x : xi) x = rng.uniform(-1.0, 1.0);
      Scenario scn = scenario_from_xi(inst, xi);
      if (cholesky_check(scn.Q2).pd && cholesky_check(scn.S2).pd) {
        out.push_back(std::move(scn));
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw IndefiniteScenario("sample_scenarios: scenario index " + std::to_string(i) +
                               " failed PD validation after 100 attempts");
    }
  }
  return out;
}

double strong_modulus(const std::vector<Scenario>& scenarios) {
  double sigma = std::numeric_limits<double>::infinity();
  for (const Scenario& scn : scenarios) {
    sigma = std::min(sigma, min_singular_value(scn.Q2));
    sigma = std::min(sigma, min_singular_value(scn.S2));
  }
  return sigma;
}

SaaProblem make_saa_problem(const ProblemInstance& inst, std::size_t n, std::uint64_t seed) {
  SaaProblem prob;
  prob.instance = inst;
  prob.scenarios = sample_scenarios(inst, n, seed);
  prob.seed = seed;
  if (!prob.scenarios.empty()) {
    prob.instance.sigma_lb = strong_modulus(prob.scenarios);
  }
  return prob;
}

namespace {

using nlohmann::json;

json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

DenseMatrix matrix_from_json(const json& j) {
  const std::size_t r = j.size();
  const std::size_t c = r > 0 ? j[0].size() : 0;
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  return m;
}

}  // namespace

std::string saa_problem_to_json(const SaaProblem& prob) {
  const ProblemInstance& in = prob.instance;
  json j;
  j["dims"] = {{"n1", in.dims.n1}, {"m1", in.dims.m1}, {"n2", in.dims.n2},
               {"m2", in.dims.m2}, {"l2", in.dims.l2}, {"s2", in.dims.s2}};
  j["tau"] = in.tau;
  j["lb"] = in.lb;
  j["ub"] = in.ub;
  j["noise_scale"] = in.noise_scale;
  j["sigma_lb"] = in.sigma_lb;
  j["seed"] = prob.seed;
  j["Q1"] = matrix_to_json(in.Q1);
  j["S1"] = matrix_to_json(in.S1);
  j["O1"] = matrix_to_json(in.O1);
  j["d1"] = in.d1;
  j["t1"] = in.t1;
  j["Qbar2"] = matrix_to_json(in.Qbar2);
  j["Sbar2"] = matrix_to_json(in.Sbar2);
  j["Obar2"] = matrix_to_json(in.Obar2);
  j["Tbar"] = matrix_to_json(in.Tbar);
  j["Abar"] = matrix_to_json(in.Abar);
  j["dbar2"] = in.dbar2;
  j["tbar2"] = in.tbar2;
  j["hbar"] = in.hbar;
  j["cbar"] = in.cbar;
  json scns = json::array();
  for (const Scenario& s : prob.scenarios) scns.push_back(json{{"xi", s.xi}});
  j["scenarios"] = scns;
  return j.dump(2);
}

SaaProblem saa_problem_from_json(const std::string& text) {
  const json j = json::parse(text);
  SaaProblem prob;
  ProblemInstance& in = prob.instance;
  in.dims.n1 = j["dims"]["n1"].get<std::size_t>();
  in.dims.m1 = j["dims"]["m1"].get<std::size_t>();
  in.dims.n2 = j["dims"]["n2"].get<std::size_t>();
  in.dims.m2 = j["dims"]["m2"].get<std::size_t>();
  in.dims.l2 = j["dims"]["l2"].get<std::size_t>();
  in.dims.s2 = j["dims"]["s2"].get<std::size_t>();
  in.tau = j["tau"].get<double>();
  in.lb = j["lb"].get<double>();
  in.ub = j["ub"].get<double>();
  in.noise_scale = j["noise_scale"].get<double>();
  in.sigma_lb = j["sigma_lb"].get<double>();
  prob.seed = j["seed"].get<std::uint64_t>();
  in.Q1 = matrix_from_json(j["Q1"]);
  in.S1 = matrix_from_json(j["S1"]);
  in.O1 = matrix_from_json(j["O1"]);
  in.d1 = j["d1"].get<Vector>();
  in.t1 = j["t1"].get<Vector>();
  in.Qbar2 = matrix_from_json(j["Qbar2"]);
  in.Sbar2 = matrix_from_json(j["Sbar2"]);
  in.Obar2 = matrix_from_json(j["Obar2"]);
  in.Tbar = matrix_from_json(j["Tbar"]);
  in.Abar = matrix_from_json(j["Abar"]);
  in.dbar2 = j["dbar2"].get<Vector>();
  in.tbar2 = j["tbar2"].get<Vector>();
  in.hbar = j["hbar"].get<Vector>();
  in.cbar = j["cbar"].get<Vector>();
  for (const json& s : j["scenarios"]) {
    prob.scenarios.push_back(scenario_from_xi(in, s["xi"].get<Vector>()));
  }
  return prob;
}

}  // namespace tsmm
