#include "gencl/linalg.hpp"

#include <cmath>
#include <cstdlib>

namespace gencl::linalg {

double asymmetry(const Matrix& m) {
  double worst = 0.0;
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = i + 1; j < m.size(); ++j)
      worst = std::max(worst, std::fabs(m(i, j) - m(j, i)));
  return worst;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j)
      worst = std::max(worst, std::fabs(a(i, j) - b(i, j)));
  return worst;
}

double trace(const Matrix& m) {
  double t = 0.0;
  for (size_t i = 0; i < m.size(); ++i) t += m(i, i);
  return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  const size_t n = a.size();
  Matrix c(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      double aik = a(i, k);
      for (size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

bool cholesky(const Matrix& a, Matrix& lower) {
  const size_t n = a.size();
  lower = Matrix(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double sum = a(i, j);
      for (size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
      if (i == j) {
        if (sum <= 0.0) return false;
        lower(i, i) = std::sqrt(sum);
      } else {
        lower(i, j) = sum / lower(j, j);
      }
    }
  }
  return true;
}

bool cholesky_inverse(const Matrix& a, Matrix& inverse) {
  const size_t n = a.size();
  Matrix lower;
  if (!cholesky(a, lower)) return false;

  // Invert by solving L L^T x = e_j column by column.
  inverse = Matrix(n);
  std::vector<double> y(n);
  for (size_t col = 0; col < n; ++col) {
    for (size_t i = 0; i < n; ++i) {
      double sum = (i == col) ? 1.0 : 0.0;
      for (size_t k = 0; k < i; ++k) sum -= lower(i, k) * y[k];
      y[i] = sum / lower(i, i);
    }
    for (size_t ii = n; ii-- > 0;) {
      double sum = y[ii];
      for (size_t k = ii + 1; k < n; ++k) sum -= lower(k, ii) * inverse(k, col);
      inverse(ii, col) = sum / lower(ii, ii);
    }
  }
  // Symmetrize away the last bits of factorization noise.
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (inverse(i, j) + inverse(j, i));
      inverse(i, j) = v;
      inverse(j, i) = v;
    }
  return true;
}

std::vector<double> apply(const Matrix& a, const std::vector<double>& x) {
  const size_t n = a.size();
  std::vector<double> y(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += a(i, j) * x[j];
    y[i] = sum;
  }
  return y;
}

double quadratic_form(const Matrix& a, const std::vector<double>& x,
                      const std::vector<double>& mu) {
  const size_t n = a.size();
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = x[i] - mu[i];
  double q = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (size_t j = 0; j < n; ++j) row += a(i, j) * d[j];
    q += d[i] * row;
  }
  return q;
}

}  // namespace gencl::linalg
