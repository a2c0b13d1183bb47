#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace avac::kernels {

// Dense linear-algebra kernels for the regression solver. The parallel
// variants split work across OpenMP threads but keep every output element's
// floating-point evaluation order fixed, so results are bit-identical to the
// serial references at any thread count. The serial references stay as the
// testing baseline.

// out = A^T A + ridge * I, where A is the design matrix stored column-major
// (column k occupies a[k*rows .. k*rows+rows)). out is cols x cols row-major.
void gram_matrix_serial(const double* a, size_t rows, size_t cols, double ridge,
                        double* out);
void gram_matrix(const double* a, size_t rows, size_t cols, double ridge,
                 double* out);

// out[k] = dot(column k of A, y).
void design_rhs_serial(const double* a, size_t rows, size_t cols,
                       const double* y, double* out);
void design_rhs(const double* a, size_t rows, size_t cols, const double* y,
                double* out);

// Diagonally pivoted Cholesky of a symmetric positive semi-definite matrix
// given as the full row-major lower triangle (upper entries ignored):
// P^T A P = L L^T. rank < n flags a (numerically) singular system.
struct PivotedCholesky {
  std::vector<double> lower;  // n x n row-major, L in the lower triangle
  std::vector<int> perm;      // column j of P picks original index perm[j]
  size_t n = 0;
  size_t rank = 0;
};

PivotedCholesky pivoted_cholesky(std::vector<double> a, size_t n);

// Solves A x = b using a full-rank factorization; throws std::runtime_error
// on rank deficiency.
std::vector<double> cholesky_solve(const PivotedCholesky& f,
                                   std::span<const double> b);

}  // namespace avac::kernels
