#pragma once

/**
 * Small dense linear algebra for the statistics stages. Matrices here are
 * d x d with d in the tens, so plain O(d^3) routines are the right tool.
 */

#include <cstddef>
#include <vector>

namespace gencl::linalg {

/// Row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

  static Matrix identity(size_t n) {
    Matrix m(n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  size_t size() const { return n_; }
  double& operator()(size_t i, size_t j) { return a_[i * n_ + j]; }
  double operator()(size_t i, size_t j) const { return a_[i * n_ + j]; }
  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

 private:
  size_t n_ = 0;
  std::vector<double> a_;
};

/// max |A(i,j) - A(j,i)|
double asymmetry(const Matrix& m);

/// max |A(i,j) - B(i,j)|
double max_abs_diff(const Matrix& a, const Matrix& b);

double trace(const Matrix& m);

Matrix multiply(const Matrix& a, const Matrix& b);

/// Cholesky factor L (lower) of a symmetric positive-definite matrix.
/// Returns false when the matrix is not numerically positive definite.
bool cholesky(const Matrix& a, Matrix& lower);

/// Inverse of a symmetric positive-definite matrix via its Cholesky factor.
/// Returns false on factorization failure.
bool cholesky_inverse(const Matrix& a, Matrix& inverse);

/// y = A x
std::vector<double> apply(const Matrix& a, const std::vector<double>& x);

/// (x - mu)^T A (x - mu)
double quadratic_form(const Matrix& a, const std::vector<double>& x,
                      const std::vector<double>& mu);

}  // namespace gencl::linalg
