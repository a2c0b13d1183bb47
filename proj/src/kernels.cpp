#include "avac/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace avac::kernels {

namespace {

double dot(const double* x, const double* y, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

void gram_matrix_serial(const double* a, size_t rows, size_t cols, double ridge,
                        double* out) {
  for (size_t i = 0; i < cols; ++i) {
    const double* ci = a + i * rows;
    for (size_t j = i; j < cols; ++j) {
      double v = dot(ci, a + j * rows, rows);
      if (i == j) v += ridge;
      out[i * cols + j] = v;
      out[j * cols + i] = v;
    }
  }
}

void gram_matrix(const double* a, size_t rows, size_t cols, double ridge,
                 double* out) {
#pragma omp parallel for schedule(dynamic, 8)
  for (size_t i = 0; i < cols; ++i) {
    const double* ci = a + i * rows;
    for (size_t j = i; j < cols; ++j) {
      double v = dot(ci, a + j * rows, rows);
      if (i == j) v += ridge;
      out[i * cols + j] = v;
      out[j * cols + i] = v;
    }
  }
}

void design_rhs_serial(const double* a, size_t rows, size_t cols,
                       const double* y, double* out) {
  for (size_t k = 0; k < cols; ++k) out[k] = dot(a + k * rows, y, rows);
}

void design_rhs(const double* a, size_t rows, size_t cols, const double* y,
                double* out) {
#pragma omp parallel for schedule(static)
  for (size_t k = 0; k < cols; ++k) out[k] = dot(a + k * rows, y, rows);
}

namespace {

// Symmetric swap of indices k and p (k < p) in a lower-triangle row-major
// matrix.
void lower_swap(std::vector<double>& a, size_t n, size_t k, size_t p) {
  std::swap(a[k * n + k], a[p * n + p]);
  for (size_t j = 0; j < k; ++j) std::swap(a[k * n + j], a[p * n + j]);
  for (size_t i = k + 1; i < p; ++i) std::swap(a[i * n + k], a[p * n + i]);
  for (size_t i = p + 1; i < n; ++i) std::swap(a[i * n + k], a[i * n + p]);
}

}  // namespace

PivotedCholesky pivoted_cholesky(std::vector<double> a, size_t n) {
  PivotedCholesky f;
  f.n = n;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);

  double max_diag0 = 0.0;
  for (size_t i = 0; i < n; ++i)
    max_diag0 = std::max(max_diag0, std::abs(a[i * n + i]));
  const double tol = std::max(static_cast<double>(n) * max_diag0 *
                                  std::numeric_limits<double>::epsilon(),
                              std::numeric_limits<double>::min());

  std::vector<double> colk(n);
  size_t rank = n;
  for (size_t k = 0; k < n; ++k) {
    size_t p = k;
    for (size_t j = k + 1; j < n; ++j)
      if (a[j * n + j] > a[p * n + p]) p = j;
    if (!(a[p * n + p] > tol)) {
      rank = k;
      break;
    }
    if (p != k) {
      lower_swap(a, n, k, p);
      std::swap(f.perm[k], f.perm[p]);
    }

    double d = std::sqrt(a[k * n + k]);
    a[k * n + k] = d;
    for (size_t i = k + 1; i < n; ++i) {
      a[i * n + k] /= d;
      colk[i] = a[i * n + k];
    }

    // Trailing update; each (i,j) element is touched exactly once per step,
    // so the result does not depend on the thread count.
#pragma omp parallel for schedule(dynamic, 32)
    for (size_t i = k + 1; i < n; ++i) {
      double* row = a.data() + i * n;
      const double lik = colk[i];
      for (size_t j = k + 1; j <= i; ++j) row[j] -= lik * colk[j];
    }
  }

  f.rank = rank;
  f.lower = std::move(a);
  return f;
}

std::vector<double> cholesky_solve(const PivotedCholesky& f,
                                   std::span<const double> b) {
  const size_t n = f.n;
  if (b.size() != n)
    throw std::invalid_argument("cholesky_solve: size mismatch");
  if (f.rank < n)
    throw std::runtime_error("cholesky_solve: matrix is rank deficient");

  std::vector<double> z(n), x(n);
  for (size_t i = 0; i < n; ++i) z[i] = b[static_cast<size_t>(f.perm[i])];

  const std::vector<double>& l = f.lower;
  for (size_t i = 0; i < n; ++i) {
    double s = z[i];
    const double* row = l.data() + i * n;
    for (size_t j = 0; j < i; ++j) s -= row[j] * z[j];
    z[i] = s / row[i];
  }
  for (size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (size_t j = ii + 1; j < n; ++j) s -= l[j * n + ii] * z[j];
    z[ii] = s / l[ii * n + ii];
  }
  for (size_t i = 0; i < n; ++i) x[static_cast<size_t>(f.perm[i])] = z[i];
  return x;
}

}  // namespace avac::kernels
