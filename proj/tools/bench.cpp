// Benchmark comparing the OpenMP kernels against their serial references:
// design-matrix Gram assembly, batch polynomial evaluation and grid sweeps.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "avac/harness.hpp"
#include "avac/kernels.hpp"
#include "avac/polymodel.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel paths run serially\n");
#endif

  std::mt19937_64 gen(123);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Gram matrix at half of the degree-5 basis width.
  {
    const size_t rows = 2000, cols = 1501;
    std::vector<double> a(rows * cols);
    for (double& v : a) v = unif(gen);
    std::vector<double> g1(cols * cols), g2(cols * cols);
    auto t0 = Clock::now();
    avac::kernels::gram_matrix_serial(a.data(), rows, cols, 1e-3, g1.data());
    double s = ms_since(t0);
    t0 = Clock::now();
    avac::kernels::gram_matrix(a.data(), rows, cols, 1e-3, g2.data());
    double p = ms_since(t0);
    report("gram 2000x1501", s, p);
    if (g1 != g2) std::printf("  MISMATCH between serial and parallel gram\n");
  }

  // Batch evaluation of a dense degree-5 model.
  {
    avac::PolyModel m;
    m.target = "PG";
    m.degree = 5;
    m.coefficients.assign(avac::MonomialBasis::expected_size(10, 5), 0.0);
    for (double& c : m.coefficients) c = unif(gen) - 0.5;
    const size_t n = 20000;
    std::vector<avac::FeatureVector> pts(n);
    for (auto& fv : pts)
      for (double& x : fv) x = unif(gen);
    std::vector<double> o1(n), o2(n);
    auto t0 = Clock::now();
    avac::predict_batch_serial(m, pts, o1);
    double s = ms_since(t0);
    t0 = Clock::now();
    avac::predict_batch(m, pts, o2);
    double p = ms_since(t0);
    report("predict 20000x d5", s, p);
    if (o1 != o2) std::printf("  MISMATCH between serial and parallel eval\n");
  }

  // Grid sweep of one trace window.
  {
    avac::SyntheticProfile prof = avac::builtin_profiles().at("mm");
    prof.length = 1000;
    prof.seed = 9;
    avac::Trace trace = avac::generate_synthetic(prof, "mm");
    avac::DeviceParams dev;
    auto grid = avac::training_grid(1, 1, true);  // full 9600 cells
    auto t0 = Clock::now();
    auto r1 = avac::sweep_window(trace, 0, 1000, grid, dev, 7, 0, false);
    double s = ms_since(t0);
    t0 = Clock::now();
    auto r2 = avac::sweep_window(trace, 0, 1000, grid, dev, 7, 0, true);
    double p = ms_since(t0);
    report("sweep 9600 cells", s, p);
    for (size_t i = 0; i < r1.size(); ++i) {
      if (r1[i].pg != r2[i].pg || r1[i].eg != r2[i].eg) {
        std::printf("  MISMATCH between serial and parallel sweep\n");
        break;
      }
    }
  }
  return 0;
}
