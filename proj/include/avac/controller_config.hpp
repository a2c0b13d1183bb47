#pragma once

namespace avac {

inline constexpr int kWaitBufferMax = 120;
inline constexpr int kBatchMax = 80;

// The tunable pair: wait-buffer size W and batch size B, in words.
// Valid iff 1 <= B <= W <= 120 and B <= 80.
struct ControllerConfig {
  int wait_buffer = 80;
  int batch = 10;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const ControllerConfig&) const = default;
};

inline ControllerConfig static_default_config() { return {80, 10}; }

}  // namespace avac
