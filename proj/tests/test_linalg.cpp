#include <cmath>

#include <doctest.h>

#include "tsmm/linalg.hpp"
#include "tsmm/rng.hpp"

using namespace tsmm;

namespace {

// characteristic-polynomial oracle for 2x2: smallest root of det(a^T a - l I)
// located by bisection, independent of the Jacobi path
double sigma_min_bisection_2x2(const DenseMatrix& a) {
  const DenseMatrix m = a.transpose().matmul(a);
  auto det_shift = [&](double l) {
    return (m(0, 0) - l) * (m(1, 1) - l) - m(0, 1) * m(1, 0);
  };
  // smallest root is below min(diag) by eigenvalue interlacing, and det <= 0 there
  double lo = 0.0, hi = std::min(m(0, 0), m(1, 1));
  // det(a^T a - l I) is positive below the smallest root
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (det_shift(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(0.5 * (lo + hi));
}

DenseMatrix random_matrix(CounterRng& rng, std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("lu_solve on simple systems") {
  CHECK(lu_solve(DenseMatrix::identity(3), {1, 2, 3}) == Vector{1, 2, 3});

  const Vector d = lu_solve(DenseMatrix::diag({2, 4}), {2, 4});
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(1.0));

  DenseMatrix perm(2, 2, {0, 1, 1, 0});
  const Vector p = lu_solve(perm, {3, 5});
  CHECK(p[0] == doctest::Approx(5.0));
  CHECK(p[1] == doctest::Approx(3.0));
}

TEST_CASE("lu_solve rejects singular matrices") {
  DenseMatrix sing(2, 2, {1, 2, 2, 4});
  CHECK_THROWS_AS(lu_solve(sing, {1, 1}), SingularMatrix);
}

TEST_CASE("lu_solve residual on random well-conditioned systems") {
  CounterRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform(0, 10));
    DenseMatrix a = random_matrix(rng, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 4.0;  // diagonally dominant
    Vector b(n);
    for (double& x : b) x = rng.uniform(-1.0, 1.0);
    const Vector x = lu_solve(a, b);
    const Vector r = vec_sub(a.matvec(x), b);
    CHECK(norm2(r) / norm2(b) <= 1e-9);
  }
}

TEST_CASE("cholesky_check classifies definiteness") {
  const auto pd = cholesky_check(DenseMatrix::diag({1, 2, 3, 4}));
  CHECK(pd.pd);
  CHECK(pd.min_pivot == doctest::Approx(1.0));

  CHECK_FALSE(cholesky_check(DenseMatrix::diag({1, -1})).pd);

  // hand Cholesky: pivots 2 and 2 - 1/2
  const auto rep = cholesky_check(DenseMatrix(2, 2, {2, 1, 1, 2}));
  CHECK(rep.pd);
  CHECK(rep.min_pivot == doctest::Approx(1.5));

  DenseMatrix asym(2, 2, {1, 0.5, 0.2, 1});
  CHECK_THROWS_AS(cholesky_check(asym), NotSymmetric);
}

TEST_CASE("cholesky_check agrees with eigenvalue sign on random symmetric 4x4") {
  CounterRng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    DenseMatrix a(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i; j < 4; ++j) {
        const double v = rng.uniform(-1.0, 1.0);
        a(i, j) = v;
        a(j, i) = v;
      }
    const double lmin = symmetric_eigenvalues(a).front();
    if (std::abs(lmin) < 1e-8) continue;  // too close to the boundary to classify
    CHECK(cholesky_check(a).pd == (lmin > 0.0));
  }
}

TEST_CASE("min_singular_value on known matrices") {
  CHECK(min_singular_value(DenseMatrix::identity(2)) == doctest::Approx(1.0));
  CHECK(min_singular_value(DenseMatrix::diag({3, 0.5})) == doctest::Approx(0.5));

  DenseMatrix shear(2, 2, {1, 1, 0, 1});
  const double expected = std::sqrt((3.0 - std::sqrt(5.0)) / 2.0);
  CHECK(min_singular_value(shear) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(min_singular_value(shear) == doctest::Approx(sigma_min_bisection_2x2(shear)).epsilon(1e-8));
}

TEST_CASE("min_singular_value lower-bounds ||Av||/||v||") {
  CounterRng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform(0, 5));
    const DenseMatrix a = random_matrix(rng, n);
    const double smin = min_singular_value(a);
    for (int probe = 0; probe < 20; ++probe) {
      Vector v(n);
      for (double& x : v) x = rng.uniform(-1.0, 1.0);
      if (norm2(v) < 1e-12) continue;
      CHECK(smin <= norm2(a.matvec(v)) / norm2(v) + 1e-10);
    }
  }
}
