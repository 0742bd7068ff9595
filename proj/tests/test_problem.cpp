#include <doctest.h>

#include "tsmm/problem.hpp"
#include "tsmm/rng.hpp"

using namespace tsmm;

TEST_CASE("xi_dim matches the 49-dimensional default layout") {
  Dimensions d;
  CHECK(d.xi_dim() == 49);
}

TEST_CASE("generate_instance fixed data") {
  Dimensions d;
  const auto inst = generate_instance(d, 0.5, -10, 10, 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(inst.Q1(i, j) == (i == j ? doctest::Approx(0.1) : doctest::Approx(0.0)));
  CHECK(inst.Qbar2(0, 0) == 1.0);
  CHECK(inst.Qbar2(1, 1) == 2.0);
  CHECK(inst.Qbar2(2, 2) == 3.0);
  CHECK(inst.Qbar2(3, 3) == 4.0);
  CHECK(inst.Qbar2(0, 1) == 0.0);
  CHECK(inst.hbar == Vector{0.1, 0.1});
  CHECK(inst.cbar == Vector{0.1, 0.1});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(inst.O1(i, j) >= 0.0);
      CHECK(inst.O1(i, j) <= 1.0);
    }
}

TEST_CASE("generate_instance rejects bad inputs") {
  Dimensions bad;
  bad.n1 = 0;
  CHECK_THROWS_AS(generate_instance(bad, 0.5, -10, 10, 1), InvalidDims);
  Dimensions d;
  CHECK_THROWS_AS(generate_instance(d, -1.0, -10, 10, 1), InvalidConfig);
  CHECK_THROWS_AS(generate_instance(d, 0.5, 10, -10, 1), InvalidConfig);
}

TEST_CASE("instance generation is bitwise deterministic") {
  Dimensions d;
  const auto a = generate_instance(d, 0.5, -10, 10, 42);
  const auto b = generate_instance(d, 0.5, -10, 10, 42);
  CHECK(a.O1.entries() == b.O1.entries());
  CHECK(a.d1 == b.d1);
  CHECK(a.Tbar.entries() == b.Tbar.entries());
  const auto c = generate_instance(d, 0.5, -10, 10, 43);
  CHECK(a.O1.entries() != c.O1.entries());
}

TEST_CASE("sample_scenarios basics") {
  Dimensions d;
  const auto inst = generate_instance(d, 0.5, -10, 10, 1);
  CHECK(sample_scenarios(inst, 0, 7).empty());

  SUBCASE("zero-noise scenario reproduces the bar data") {
    const auto scn = scenario_from_xi(inst, Vector(d.xi_dim(), 0.0));
    CHECK(scn.Q2(0, 0) == doctest::Approx(0.5));
    CHECK(scn.Q2(1, 1) == doctest::Approx(1.0));
    CHECK(scn.Q2(2, 2) == doctest::Approx(1.5));
    CHECK(scn.Q2(3, 3) == doctest::Approx(2.0));
    CHECK(scn.Q2(0, 1) == doctest::Approx(0.0));
    CHECK(scn.h[0] == doctest::Approx(0.1));
    CHECK(scn.h[1] == doctest::Approx(0.1));
    // W = (I, 0), B = (I, 0)
    CHECK(scn.W(0, 0) == 1.0);
    CHECK(scn.W(0, 2) == 0.0);
    CHECK(scn.B(1, 1) == 1.0);
  }

  SUBCASE("xi layout: first entries fill the Q2 upper triangle row-major") {
    Vector xi(d.xi_dim(), 0.0);
    xi[1] = 1.0;  // (0,1) entry of Q~2
    const auto scn = scenario_from_xi(inst, xi);
    CHECK(scn.Q2(0, 1) == doctest::Approx(0.1));
    CHECK(scn.Q2(1, 0) == doctest::Approx(0.1));
  }

  SUBCASE("all sampled scenarios pass PD validation at tau=0.5") {
    const auto scns = sample_scenarios(inst, 50, 7);
    CHECK(scns.size() == 50);
    for (const auto& s : scns) {
      CHECK(cholesky_check(s.Q2).pd);
      CHECK(cholesky_check(s.S2).pd);
      // Gershgorin: lambda_min(Q2) >= tau*1 - 0.1 - 0.1*(n2-1) = 0.1
      CHECK(symmetric_eigenvalues(s.Q2).front() >= 0.1 - 1e-12);
    }
  }
}

TEST_CASE("sampling is deterministic and prefix-stable") {
  Dimensions d;
  const auto inst = generate_instance(d, 0.5, -10, 10, 1);
  const auto a = sample_scenarios(inst, 10, 7);
  const auto b = sample_scenarios(inst, 10, 7);
  for (std::size_t i = 0; i < 10; ++i) CHECK(a[i].xi == b[i].xi);
  // nested sampling: smaller-N sets are prefixes of larger-N sets
  const auto big = sample_scenarios(inst, 25, 7);
  for (std::size_t i = 0; i < 10; ++i) CHECK(a[i].xi == big[i].xi);
}

TEST_CASE("strong_modulus") {
  Dimensions d;
  const auto inst = generate_instance(d, 0.5, -10, 10, 1);

  SUBCASE("zero-noise value is tau") {
    std::vector<Scenario> scns{scenario_from_xi(inst, Vector(d.xi_dim(), 0.0))};
    CHECK(strong_modulus(scns) == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("toy diagonal scenario") {
    Scenario scn = scenario_from_xi(inst, Vector(d.xi_dim(), 0.0));
    scn.Q2 = DenseMatrix::diag({0.5, 1.0, 1.0, 1.0});
    scn.S2 = DenseMatrix::identity(3);
    CHECK(strong_modulus({scn}) == doctest::Approx(0.5));
  }

  SUBCASE("Gershgorin bracket and quadratic-form lower bound") {
    const auto prob = make_saa_problem(inst, 50, 7);
    CHECK(prob.instance.sigma_lb >= 0.1);
    CHECK(prob.instance.sigma_lb <= 0.5);
    CounterRng rng(3);
    for (int probe = 0; probe < 100; ++probe) {
      const auto& scn = prob.scenarios[probe % prob.scenarios.size()];
      Vector v(4);
      for (double& x : v) x = rng.uniform(-1.0, 1.0);
      const double q = dot(v, scn.Q2.matvec(v));
      CHECK(q >= prob.instance.sigma_lb * dot(v, v) - 1e-9);
      Vector u(3);
      for (double& x : u) x = rng.uniform(-1.0, 1.0);
      CHECK(dot(u, scn.S2.matvec(u)) >= prob.instance.sigma_lb * dot(u, u) - 1e-9);
    }
  }
}

TEST_CASE("json round trip preserves the problem") {
  Dimensions d;
  const auto inst = generate_instance(d, 0.5, -10, 10, 5);
  const auto prob = make_saa_problem(inst, 4, 9);
  const auto round = saa_problem_from_json(saa_problem_to_json(prob));
  CHECK(round.scenarios.size() == 4);
  CHECK(round.instance.O1.entries() == prob.instance.O1.entries());
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(round.scenarios[i].xi == prob.scenarios[i].xi);
    CHECK(round.scenarios[i].Q2.entries() == prob.scenarios[i].Q2.entries());
  }
}
