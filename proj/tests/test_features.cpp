#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "avac/features.hpp"
#include "avac/rng.hpp"

using namespace avac;

namespace {

// Naive O(n^2) recount of all eight features, kept free of hash containers
// and shared helpers so it stays an independent oracle.
RawFeatures naive_features(const std::vector<MemoryAccess>& w) {
  RawFeatures f;
  size_t n = w.size();
  size_t reads = 0, writes = 0;
  for (const auto& a : w)
    (a.kind == AccessKind::Read ? reads : writes)++;
  f.rw_ratio = static_cast<double>(reads) / static_cast<double>(n);

  auto count_unique = [&](AccessKind kind) {
    size_t unique = 0;
    for (size_t i = 0; i < n; ++i) {
      if (w[i].kind != kind) continue;
      bool seen = false;
      for (size_t j = 0; j < i; ++j)
        if (w[j].kind == kind && w[j].address == w[i].address) seen = true;
      if (!seen) ++unique;
    }
    return unique;
  };
  auto count_runs = [&](AccessKind kind) {
    size_t runs = 0;
    for (size_t i = 0; i < n; ++i)
      if (w[i].kind == kind && (i == 0 || w[i - 1].kind != kind)) ++runs;
    return runs;
  };

  if (reads > 0) {
    size_t ur = count_unique(AccessKind::Read);
    f.read_locality = 1.0 - static_cast<double>(ur) / reads;
    f.mean_read_burst =
        static_cast<double>(reads) / count_runs(AccessKind::Read);
    f.mean_read_rep = static_cast<double>(reads) / ur;
  }
  if (writes > 0) {
    size_t uw = count_unique(AccessKind::Write);
    f.write_locality = 1.0 - static_cast<double>(uw) / writes;
    f.mean_write_burst =
        static_cast<double>(writes) / count_runs(AccessKind::Write);
    f.mean_write_rep = static_cast<double>(writes) / uw;
  }

  // Toggle counts per bit position over consecutive writes to each address.
  double toggles[32] = {0};
  for (size_t i = 0; i < n; ++i) {
    if (w[i].kind != AccessKind::Write) continue;
    for (size_t j = i + 1; j < n; ++j) {
      if (w[j].kind != AccessKind::Write || w[j].address != w[i].address)
        continue;
      for (int b = 0; b < 32; ++b)
        if (((w[i].data ^ w[j].data) >> b) & 1u) toggles[b] += 1.0;
      break;  // only the next write to the same address
    }
  }
  double mean = 0.0;
  for (double t : toggles) mean += t;
  mean /= 32.0;
  if (mean > 0.0) {
    double var = 0.0;
    for (double t : toggles) var += (t - mean) * (t - mean);
    var /= 32.0;
    f.bit_change_variation = std::sqrt(var) / mean;
  }
  return f;
}

void check_close(const RawFeatures& a, const RawFeatures& b) {
  CHECK(a.rw_ratio == doctest::Approx(b.rw_ratio).epsilon(1e-12));
  CHECK(a.read_locality == doctest::Approx(b.read_locality).epsilon(1e-12));
  CHECK(a.write_locality == doctest::Approx(b.write_locality).epsilon(1e-12));
  CHECK(a.mean_read_burst == doctest::Approx(b.mean_read_burst).epsilon(1e-12));
  CHECK(a.mean_write_burst ==
        doctest::Approx(b.mean_write_burst).epsilon(1e-12));
  CHECK(a.mean_read_rep == doctest::Approx(b.mean_read_rep).epsilon(1e-12));
  CHECK(a.mean_write_rep == doctest::Approx(b.mean_write_rep).epsilon(1e-12));
  CHECK(a.bit_change_variation ==
        doctest::Approx(b.bit_change_variation).epsilon(1e-12));
}

std::vector<MemoryAccess> random_window(Rng& rng, size_t max_len) {
  size_t len = 1 + rng.below(max_len);
  std::vector<MemoryAccess> w;
  w.reserve(len);
  for (size_t i = 0; i < len; ++i) {
    bool read = rng.uniform01() < 0.5;
    uint32_t addr = static_cast<uint32_t>(rng.below(24));  // force collisions
    uint32_t data = static_cast<uint32_t>(rng.next_u64());
    w.push_back({read ? AccessKind::Read : AccessKind::Write, addr, data});
  }
  return w;
}

}  // namespace

TEST_CASE("all-distinct read window") {
  std::vector<MemoryAccess> w;
  for (uint32_t i = 0; i < 10; ++i)
    w.push_back({AccessKind::Read, 100 + i, 0});
  RawFeatures f = extract_features(w);
  CHECK(f.rw_ratio == 1.0);
  CHECK(f.read_locality == 0.0);
  CHECK(f.mean_read_burst == 10.0);
  CHECK(f.mean_read_rep == 1.0);
  CHECK(f.write_locality == 0.0);
  CHECK(f.mean_write_burst == 0.0);
  CHECK(f.mean_write_rep == 0.0);
  CHECK(f.bit_change_variation == 0.0);
}

TEST_CASE("hand-traced R,R,W,R window") {
  std::vector<MemoryAccess> w = {{AccessKind::Read, 0xA, 0},
                                 {AccessKind::Read, 0xA, 0},
                                 {AccessKind::Write, 0xB, 0x1},
                                 {AccessKind::Read, 0xA, 0}};
  RawFeatures f = extract_features(w);
  CHECK(f.rw_ratio == doctest::Approx(0.75));
  CHECK(f.read_locality == doctest::Approx(2.0 / 3.0));
  CHECK(f.mean_read_burst == doctest::Approx(1.5));
  CHECK(f.mean_write_burst == doctest::Approx(1.0));
  CHECK(f.mean_read_rep == doctest::Approx(3.0));
  check_close(f, naive_features(w));
}

TEST_CASE("alternating 0x0/0xF writes concentrate toggles in the low bits") {
  const int n = 11;
  std::vector<MemoryAccess> w;
  for (int i = 0; i < n; ++i)
    w.push_back({AccessKind::Write, 0x42, (i % 2) ? 0xFu : 0x0u});
  RawFeatures f = extract_features(w);

  // Closed-form recount: bits 0..3 toggle n-1 times, the rest never.
  double toggles[32] = {0};
  for (int b = 0; b < 4; ++b) toggles[b] = n - 1;
  double mean = 4.0 * (n - 1) / 32.0;
  double var = 0.0;
  for (double t : toggles) var += (t - mean) * (t - mean);
  var /= 32.0;
  double expected_cv = std::sqrt(var) / mean;

  CHECK(f.bit_change_variation == doctest::Approx(expected_cv).epsilon(1e-12));
  check_close(f, naive_features(w));
}

TEST_CASE("empty window is an error") {
  std::vector<MemoryAccess> w;
  CHECK_THROWS_AS(extract_features(w), std::invalid_argument);
}

TEST_CASE("extractor equals the naive recount oracle on random windows") {
  Rng rng(77);
  for (int rep = 0; rep < 300; ++rep) {
    auto w = random_window(rng, 200);
    check_close(extract_features(w), naive_features(w));
  }
}

TEST_CASE("features are invariant under address relabeling") {
  Rng rng(78);
  for (int rep = 0; rep < 50; ++rep) {
    auto w = random_window(rng, 150);
    // Random bijection on the small address universe.
    std::vector<uint32_t> perm(24);
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<uint32_t>(i);
    for (size_t i = perm.size(); i-- > 1;)
      std::swap(perm[i], perm[rng.below(i + 1)]);
    auto relabeled = w;
    for (auto& a : relabeled) a.address = 1000 + perm[a.address];
    check_close(extract_features(w), extract_features(relabeled));
  }
}

TEST_CASE("burst means under concatenation stay above the recount floor") {
  Rng rng(79);
  for (int rep = 0; rep < 30; ++rep) {
    auto a = random_window(rng, 100);
    auto b = random_window(rng, 100);
    std::vector<MemoryAccess> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    RawFeatures f = extract_features(ab);
    check_close(f, naive_features(ab));  // the oracle is the ground truth here
  }
}

TEST_CASE("feature vector normalization and config components") {
  RawFeatures raw;
  raw.rw_ratio = 0.5;
  raw.mean_read_burst = 2000.0;  // clamps at 1
  raw.bit_change_variation = 3.0;

  FeatureNormalizers norms;  // burst/rep scale 1000, cv cap 1
  FeatureVector fv = build_feature_vector(raw, {120, 80}, norms);
  CHECK(fv[3] == 1.0);
  CHECK(fv[7] == 1.0);
  CHECK(fv[8] == 1.0);
  CHECK(fv[9] == 1.0);

  fv = build_feature_vector(RawFeatures{}, {80, 10}, norms);
  CHECK(fv[8] == doctest::Approx(80.0 / 120.0).epsilon(1e-12));
  CHECK(fv[9] == doctest::Approx(0.125).epsilon(1e-12));

  fv = build_feature_vector(RawFeatures{}, {1, 1}, norms);
  for (size_t i = 0; i < 8; ++i) CHECK(fv[i] == 0.0);
  CHECK(fv[8] == doctest::Approx(1.0 / 120.0));
  CHECK(fv[9] == doctest::Approx(1.0 / 80.0));
}

TEST_CASE("configuration bounds are enforced") {
  auto validates = [](int w, int b) {
    ControllerConfig c{w, b};
    c.validate();
  };
  CHECK_NOTHROW(validates(80, 10));
  CHECK_NOTHROW(validates(120, 80));
  CHECK_NOTHROW(validates(1, 1));
  CHECK_THROWS_AS(validates(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(validates(121, 10), std::invalid_argument);
  CHECK_THROWS_AS(validates(80, 81), std::invalid_argument);
  CHECK_THROWS_AS(validates(80, 0), std::invalid_argument);
  CHECK_THROWS_AS(validates(10, 20), std::invalid_argument);
  FeatureNormalizers norms;
  ControllerConfig bad{10, 20};
  CHECK_THROWS_AS(build_feature_vector(RawFeatures{}, bad, norms),
                  std::invalid_argument);
}
