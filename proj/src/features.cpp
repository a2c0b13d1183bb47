#include "avac/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace avac {

RawFeatures extract_features(std::span<const MemoryAccess> window) {
  if (window.empty())
    throw std::invalid_argument("extract_features: empty window");

  size_t reads = 0, writes = 0;
  size_t read_runs = 0, write_runs = 0;
  std::unordered_set<uint32_t> unique_reads, unique_writes;
  std::unordered_map<uint32_t, uint32_t> last_write;
  std::array<uint64_t, 32> toggles{};

  AccessKind prev = AccessKind::Read;
  bool first = true;
  for (const auto& a : window) {
    if (a.kind == AccessKind::Read) {
      ++reads;
      unique_reads.insert(a.address);
      if (first || prev != AccessKind::Read) ++read_runs;
    } else {
      ++writes;
      unique_writes.insert(a.address);
      if (first || prev != AccessKind::Write) ++write_runs;
      if (auto it = last_write.find(a.address); it != last_write.end()) {
        uint32_t diff = it->second ^ a.data;
        while (diff != 0) {
          int bit = std::countr_zero(diff);
          ++toggles[static_cast<size_t>(bit)];
          diff &= diff - 1;
        }
        it->second = a.data;
      } else {
        last_write.emplace(a.address, a.data);
      }
    }
    prev = a.kind;
    first = false;
  }

  RawFeatures f;
  f.rw_ratio = static_cast<double>(reads) / static_cast<double>(window.size());
  if (reads > 0) {
    f.read_locality =
        1.0 - static_cast<double>(unique_reads.size()) / static_cast<double>(reads);
    f.mean_read_burst = static_cast<double>(reads) / static_cast<double>(read_runs);
    f.mean_read_rep =
        static_cast<double>(reads) / static_cast<double>(unique_reads.size());
  }
  if (writes > 0) {
    f.write_locality =
        1.0 - static_cast<double>(unique_writes.size()) / static_cast<double>(writes);
    f.mean_write_burst =
        static_cast<double>(writes) / static_cast<double>(write_runs);
    f.mean_write_rep =
        static_cast<double>(writes) / static_cast<double>(unique_writes.size());
  }

  uint64_t total = 0;
  for (uint64_t c : toggles) total += c;
  if (total > 0) {
    double mean = static_cast<double>(total) / 32.0;
    double var = 0.0;
    for (uint64_t c : toggles) {
      double d = static_cast<double>(c) - mean;
      var += d * d;
    }
    var /= 32.0;
    f.bit_change_variation = std::sqrt(var) / mean;
  }
  return f;
}

void ControllerConfig::validate() const {
  if (wait_buffer < 1 || wait_buffer > kWaitBufferMax)
    throw std::invalid_argument("config: wait_buffer must be in [1," +
                                std::to_string(kWaitBufferMax) + "]");
  if (batch < 1 || batch > kBatchMax)
    throw std::invalid_argument("config: batch must be in [1," +
                                std::to_string(kBatchMax) + "]");
  if (batch > wait_buffer)
    throw std::invalid_argument("config: batch must not exceed wait_buffer");
}

FeatureVector build_feature_vector(const RawFeatures& raw,
                                   const ControllerConfig& config,
                                   const FeatureNormalizers& norms) {
  config.validate();
  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
  FeatureVector fv;
  fv[0] = clamp01(raw.rw_ratio);
  fv[1] = clamp01(raw.read_locality);
  fv[2] = clamp01(raw.write_locality);
  fv[3] = clamp01(raw.mean_read_burst / norms.burst_scale);
  fv[4] = clamp01(raw.mean_write_burst / norms.burst_scale);
  fv[5] = clamp01(raw.mean_read_rep / norms.rep_scale);
  fv[6] = clamp01(raw.mean_write_rep / norms.rep_scale);
  fv[7] = clamp01(std::min(raw.bit_change_variation, norms.cv_cap) / norms.cv_cap);
  fv[kFvWaitBuffer] = static_cast<double>(config.wait_buffer) / kWaitBufferMax;
  fv[kFvBatch] = static_cast<double>(config.batch) / kBatchMax;
  return fv;
}

}  // namespace avac
