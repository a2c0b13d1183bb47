#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "avac/controller_config.hpp"
#include "avac/features.hpp"
#include "avac/rng.hpp"
#include "avac/rram.hpp"
#include "avac/trace.hpp"

namespace avac {

struct SimCounts {
  uint64_t writes_coalesced = 0;  // words written to RRAM through batch flushes
  uint64_t wb_read_hits = 0;
  uint64_t wb_write_merges = 0;
  uint64_t rram_reads = 0;
  uint64_t batches_flushed = 0;

  bool operator==(const SimCounts&) const = default;
};

struct SimMetrics {
  double total_time_ns = 0.0;
  double stall_time_ns = 0.0;
  double rram_busy_ns = 0.0;
  double e_write = 0.0;
  double e_read = 0.0;
  double e_leak = 0.0;
  double e_buffer = 0.0;
  SimCounts counts;

  double total_energy() const { return e_write + e_read + e_leak + e_buffer; }
  bool operator==(const SimMetrics&) const = default;
};

// Field-wise difference, for per-interval deltas of a running simulation.
SimMetrics metrics_delta(const SimMetrics& after, const SimMetrics& before);

// Reference system without the controller: the synchronous processor budgets
// the worst case for every write (full-word programming pulse, no write
// termination), reads go straight to the RRAM, and no word-lines are kept
// powered between accesses.
SimMetrics simulate_reference(std::span<const MemoryAccess> accesses,
                              const DeviceParams& device);
SimMetrics simulate_reference(const Trace& trace, const DeviceParams& device);

// Wait-Buffer/batch controller simulation. One access issues per t_cpu when
// the processor is not stalled.
//
//   write, address unlocked & present   merge in place (buffer cost)
//   write, new address, capacity free   insert (buffer cost)
//   unlocked pending >= B & RRAM idle   lock B oldest, flush back-to-back;
//                                       flush time = sum of word write times
//   write, buffer full                  stall until the flush frees space
//   read, unlocked hit                  served from buffer (buffer cost)
//   read, locked hit or RRAM busy       queued in the read buffer, processor
//                                       stalls until the flush completes, then
//                                       served from RRAM
//   read miss, RRAM idle                direct RRAM read
//
// Leakage is charged on the time-weighted occupancy of the buffer (powered
// word-lines follow the entries they hold); see the notes in README.md.
class VacSimulator {
 public:
  VacSimulator(const ControllerConfig& config, const DeviceParams& device,
               Rng rng);

  void run(std::span<const MemoryAccess> accesses);
  // Flushes everything still buffered (partial final batch allowed) and
  // advances total time to the last flush completion.
  void drain();
  // Takes effect between accesses; shrinking below current occupancy forces
  // flushes first so the gated lines are empty.
  void set_config(const ControllerConfig& config);

  SimMetrics metrics() const;
  const ControllerConfig& config() const { return config_; }
  const std::unordered_map<uint32_t, uint32_t>& rram_contents() const {
    return rram_;
  }
  size_t buffer_occupancy() const { return unlocked_.size() + locked_.size(); }

  // Optional test hook: every read's returned value is appended here.
  std::vector<uint32_t>* read_log = nullptr;

 private:
  struct PendingRead {
    uint32_t address;
    double enqueued_ns;
  };

  void on_write(uint32_t addr, uint32_t data);
  void on_read(uint32_t addr);
  void complete_flushes_up_to(double t);
  void lock_and_flush(size_t count, double at);
  void maybe_lock(double at);
  void touch_occupancy(double t);
  uint32_t rram_word(uint32_t addr) const;

  ControllerConfig config_;
  DeviceParams dev_;
  Rng rng_;

  struct Entry {
    uint32_t data;
  };
  std::unordered_map<uint32_t, Entry> unlocked_;
  std::deque<uint32_t> fifo_;  // unlocked addresses in insertion order
  std::vector<std::pair<uint32_t, uint32_t>> locked_;
  std::deque<PendingRead> read_buffer_;  // depth <= 1 under single issue
  std::unordered_map<uint32_t, uint32_t> rram_;

  bool flush_active_ = false;
  double flush_end_ns_ = 0.0;

  double now_ns_ = 0.0;
  double occ_integral_word_ns_ = 0.0;
  double occ_mark_ns_ = 0.0;

  SimMetrics base_;  // everything except e_leak/total_time, kept incrementally
};

// Convenience wrapper: fresh simulator, run, drain.
SimMetrics simulate_vac(const Trace& trace, const ControllerConfig& config,
                        const DeviceParams& device, Rng rng,
                        std::vector<uint32_t>* read_log = nullptr);

struct Gains {
  double pg = 0.0;
  double eg = 0.0;
};

// pg = (ref.time - vac.time) / ref.time, eg likewise over total energy.
Gains compute_gains(const SimMetrics& vac, const SimMetrics& ref);

struct IntervalResult {
  FeatureVector fv;         // window features + the config the window ran under
  ControllerConfig config;  // config the window ran under
  double pg = 0.0;
  double eg = 0.0;
};

struct IntervalRun {
  std::vector<IntervalResult> intervals;
  SimMetrics aggregate;
};

// Called between intervals with the finished window's raw features and the
// config it ran under; returns the config for the next interval.
using TunerCallback =
    std::function<ControllerConfig(const RawFeatures&, const ControllerConfig&)>;

// Partitions the trace into consecutive windows of `interval` accesses (final
// partial window included), runs each under the current config with buffer
// state carried across boundaries, and reports per-window gains against the
// reference simulation of the same window.
IntervalRun simulate_intervals(const Trace& trace, ControllerConfig initial,
                               size_t interval, const TunerCallback* tuner,
                               const DeviceParams& device, Rng rng);

}  // namespace avac
