#pragma once

#include <cstddef>
#include <vector>

#include "tsmm/errors.hpp"

namespace tsmm {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Intended for the small systems that show up
/// here (dimension <= ~50); everything is O(n^3) direct methods.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diag(const Vector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  const std::vector<double>& entries() const { return entries_; }

  DenseMatrix transpose() const;
  Vector matvec(const Vector& v) const;
  Vector matvec_transpose(const Vector& v) const;
  DenseMatrix matmul(const DenseMatrix& other) const;

  bool is_symmetric(double tol) const;
  double max_abs() const;

  // throws on non-finite entries
  void validate_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

struct CholeskyReport {
  bool pd = false;
  double min_pivot = 0.0;
};

// Solve a x = b by LU with partial pivoting. Throws SingularMatrix when a
// pivot falls below 1e-14 * max |a_ij|.
Vector lu_solve(const DenseMatrix& a, const Vector& b);

// Cholesky-based positive definiteness probe; pivots are the Schur-complement
// diagonal values before the square root. Throws NotSymmetric if the input is
// not symmetric within 1e-12 componentwise.
CholeskyReport cholesky_check(const DenseMatrix& a);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
Vector symmetric_eigenvalues(const DenseMatrix& a);

// Smallest / largest singular value via a symmetric eigensolve of a^T a.
double min_singular_value(const DenseMatrix& a);
double spectral_norm(const DenseMatrix& a);

// Vector helpers.
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
Vector vec_add(const Vector& a, const Vector& b);
Vector vec_sub(const Vector& a, const Vector& b);
Vector vec_scale(double s, const Vector& a);

}  // namespace tsmm
