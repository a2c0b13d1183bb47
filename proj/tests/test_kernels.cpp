#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "avac/kernels.hpp"
#include "avac/polymodel.hpp"
#include "avac/rng.hpp"

using namespace avac;

namespace {

// Small dense Gaussian elimination with partial pivoting, as an independent
// solve oracle.
std::vector<double> gauss_solve(std::vector<double> a, std::vector<double> b,
                                size_t n) {
  for (size_t k = 0; k < n; ++k) {
    size_t p = k;
    for (size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    for (size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
    std::swap(b[k], b[p]);
    for (size_t i = k + 1; i < n; ++i) {
      double f = a[i * n + k] / a[k * n + k];
      for (size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (size_t j = ii + 1; j < n; ++j) s -= a[ii * n + j] * x[j];
    x[ii] = s / a[ii * n + ii];
  }
  return x;
}

}  // namespace

TEST_CASE("parallel gram matrix is bit-identical to the serial reference") {
  Rng rng(41);
  const size_t rows = 200, cols = 90;
  std::vector<double> a(rows * cols);
  for (double& v : a) v = rng.uniform01() * 2.0 - 1.0;
  std::vector<double> g1(cols * cols), g2(cols * cols);
  kernels::gram_matrix_serial(a.data(), rows, cols, 1e-3, g1.data());
  kernels::gram_matrix(a.data(), rows, cols, 1e-3, g2.data());
  CHECK(g1 == g2);
  // Symmetry and the ridge on the diagonal.
  for (size_t i = 0; i < cols; ++i)
    for (size_t j = 0; j < cols; ++j)
      CHECK(g1[i * cols + j] == g1[j * cols + i]);
}

TEST_CASE("parallel rhs is bit-identical to the serial reference") {
  Rng rng(42);
  const size_t rows = 300, cols = 50;
  std::vector<double> a(rows * cols), y(rows);
  for (double& v : a) v = rng.uniform01() - 0.5;
  for (double& v : y) v = rng.uniform01() - 0.5;
  std::vector<double> r1(cols), r2(cols);
  kernels::design_rhs_serial(a.data(), rows, cols, y.data(), r1.data());
  kernels::design_rhs(a.data(), rows, cols, y.data(), r2.data());
  CHECK(r1 == r2);
}

TEST_CASE("pivoted Cholesky solves SPD systems") {
  Rng rng(43);
  const size_t n = 60;
  // A = M^T M + I is SPD.
  std::vector<double> m(n * n), a(n * n, 0.0), b(n);
  for (double& v : m) v = rng.uniform01() - 0.5;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
      a[i * n + j] = s + (i == j ? 1.0 : 0.0);
    }
  for (double& v : b) v = rng.uniform01() - 0.5;

  kernels::PivotedCholesky f = kernels::pivoted_cholesky(a, n);
  CHECK(f.rank == n);
  std::vector<double> x = kernels::cholesky_solve(f, b);
  std::vector<double> want = gauss_solve(a, b, n);
  for (size_t i = 0; i < n; ++i)
    CHECK(x[i] == doctest::Approx(want[i]).epsilon(1e-8));
}

TEST_CASE("rank deficiency is detected") {
  const size_t n = 8;
  // Rank-1 matrix: outer product of ones.
  std::vector<double> a(n * n, 1.0);
  kernels::PivotedCholesky f = kernels::pivoted_cholesky(a, n);
  CHECK(f.rank == 1);
  std::vector<double> b(n, 1.0);
  CHECK_THROWS_AS(kernels::cholesky_solve(f, b), std::runtime_error);
}

TEST_CASE("factorization reconstructs the permuted matrix") {
  Rng rng(44);
  const size_t n = 24;
  std::vector<double> m(n * n), a(n * n);
  for (double& v : m) v = rng.uniform01() - 0.5;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
      a[i * n + j] = s + (i == j ? 0.5 : 0.0);
    }
  kernels::PivotedCholesky f = kernels::pivoted_cholesky(a, n);
  REQUIRE(f.rank == n);
  // (L L^T)[i][j] must equal A[perm[i]][perm[j]].
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (size_t k = 0; k <= j; ++k)
        s += f.lower[i * n + k] * f.lower[j * n + k];
      double want = a[static_cast<size_t>(f.perm[i]) * n +
                      static_cast<size_t>(f.perm[j])];
      CHECK(s == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("parallel batch prediction is bit-identical to serial") {
  Rng rng(45);
  PolyModel m;
  m.target = "PG";
  m.degree = 5;
  m.coefficients.assign(MonomialBasis::expected_size(10, 5), 0.0);
  for (double& c : m.coefficients) c = rng.uniform01() - 0.5;
  std::vector<FeatureVector> pts(500);
  for (auto& fv : pts)
    for (double& x : fv) x = rng.uniform01();
  std::vector<double> o1(pts.size()), o2(pts.size());
  predict_batch_serial(m, pts, o1);
  predict_batch(m, pts, o2);
  CHECK(o1 == o2);
  for (size_t i = 0; i < 10; ++i) CHECK(o1[i] == m.predict(pts[i]));
}
