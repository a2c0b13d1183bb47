#pragma once

#include <array>
#include <span>

#include "avac/controller_config.hpp"
#include "avac/trace.hpp"

namespace avac {

// The eight per-window trace features. Conventions for windows with no reads
// (or no writes): that kind's features are all 0.
//
//   rw_ratio             reads / window size
//   read_locality        1 - unique read addresses / reads
//   write_locality       1 - unique write addresses / writes
//   mean_read_burst      mean length of maximal runs of consecutive reads
//   mean_write_burst     likewise for writes
//   mean_read_rep        reads / unique read addresses
//   mean_write_rep       writes / unique write addresses
//   bit_change_variation coefficient of variation, across the 32 bit
//                        positions, of toggle counts between consecutive
//                        writes to the same address (0 if no toggles)
struct RawFeatures {
  double rw_ratio = 0.0;
  double read_locality = 0.0;
  double write_locality = 0.0;
  double mean_read_burst = 0.0;
  double mean_write_burst = 0.0;
  double mean_read_rep = 0.0;
  double mean_write_rep = 0.0;
  double bit_change_variation = 0.0;
};

RawFeatures extract_features(std::span<const MemoryAccess> window);

// Scale constants mapping raw features into [0,1]; persisted with fitted
// models so training and inference always agree.
struct FeatureNormalizers {
  double burst_scale = 1000.0;
  double rep_scale = 1000.0;
  double cv_cap = 1.0;

  bool operator==(const FeatureNormalizers&) const = default;
};

// The 8 normalized features followed by W/120 and B/80; every component in [0,1].
using FeatureVector = std::array<double, 10>;

inline constexpr size_t kFvWaitBuffer = 8;
inline constexpr size_t kFvBatch = 9;

FeatureVector build_feature_vector(const RawFeatures& raw,
                                   const ControllerConfig& config,
                                   const FeatureNormalizers& norms);

}  // namespace avac
