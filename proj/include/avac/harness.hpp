#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avac/config_file.hpp"
#include "avac/controller.hpp"
#include "avac/polymodel.hpp"
#include "avac/trace.hpp"
#include "avac/tuner.hpp"

namespace avac {

// End-to-end experiment settings; loadable from a flat key-value config file
// with device.*, tuner.*, train.* and experiment.* keys.
struct ExperimentConfig {
  // Trace sources: "profile:<name>[:<length>[:<seed>]]",
  // "staged:<name>[:<length>[:<seed>]]" or "file:<path>" (a bare string is a
  // file path). Defaults to the built-in application profiles.
  std::vector<std::string> trace_specs;
  size_t interval = 1000;
  ControllerConfig static_config = static_default_config();
  uint64_t seed = 42;
  std::string output_dir = "out";
  size_t default_trace_length = 4000;

  DeviceParams device;
  TunerParams tuner;
  bool tuner_enabled = true;

  // Training grid strides over W and B; bound values are always included.
  int grid_w_stride = 10;
  int grid_b_stride = 5;
  double ridge = 1e-3;
  int degree = 5;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_config(const ConfigFile& cf);
  void validate() const;
};

// Built-in synthetic application profiles (lengths and seeds filled per use).
const std::map<std::string, SyntheticProfile>& builtin_profiles();

// Three-stage staged workload: reads only, then convolution-like, then a
// matrix-multiply/decision-tree mix.
std::vector<SyntheticProfile> staged_stages(const std::string& name,
                                            size_t total_length, uint64_t seed);

// Materializes one trace spec. `index` salts the seed of generated traces so
// distinct sources differ; an explicit seed in the spec wins.
Trace materialize_trace(const std::string& spec, size_t default_length,
                        uint64_t base_seed, size_t index);

// Grid of (W, B) training configurations. Cells with B > W run with B clamped
// to W but still produce a dataset row at their effective configuration.
std::vector<ControllerConfig> training_grid(int w_stride, int b_stride,
                                            bool full_grid = false);

struct TrainResult {
  Dataset dataset;
  PolyModel pg_model;  // at ExperimentConfig::degree
  PolyModel eg_model;
  FitReport report_d3;
  FitReport report_d5;
  std::string dataset_path;
  std::string pg_path;
  std::string eg_path;
};

// Simulates every (trace window, grid cell) pair against the window's
// reference run, assembles the dataset, fits PG/EG at degrees 3 and 5, and
// persists the dataset plus the models at the configured degree.
TrainResult train_pipeline(const ExperimentConfig& cfg);

struct IntervalRecord {
  size_t index = 0;
  ControllerConfig config;
  double pg = 0.0;
  double eg = 0.0;
  double reward = 0.0;
};

struct TraceGains {
  std::string trace;
  double pg_static = 0.0, eg_static = 0.0;
  double pg_adaptive = 0.0, eg_adaptive = 0.0;
  double reward_static = 0.0, reward_adaptive = 0.0;          // aggregate
  double cum_reward_static = 0.0, cum_reward_adaptive = 0.0;  // per-interval sums
  std::vector<IntervalRecord> static_intervals;
  std::vector<IntervalRecord> adaptive_intervals;
};

struct GainReport {
  std::vector<TraceGains> traces;
  std::string json_path;
  std::string gains_csv_path;
  std::string intervals_csv_path;
};

// Runs reference, static and (tuner-driven) adaptive simulations per trace
// with a shared seed, and writes the report as JSON plus CSV time series.
GainReport eval_pipeline(const ExperimentConfig& cfg,
                         const std::string& models_dir);

struct SweepRow {
  ControllerConfig config;
  double pg = 0.0;
  double eg = 0.0;
};

// (W, B, pg, eg) over the grid for one window of one trace; the seed is shared
// across cells so rows differ by configuration only.
std::vector<SweepRow> sweep_window(const Trace& trace, size_t window_index,
                                   size_t interval,
                                   const std::vector<ControllerConfig>& grid,
                                   const DeviceParams& device, uint64_t seed,
                                   uint64_t stream, bool parallel = true);

// CLI entry for the sweep: resolves the trace spec, runs the grid, writes CSV.
std::string sweep_pipeline(const ExperimentConfig& cfg,
                           const std::string& trace_spec, bool full_grid,
                           size_t window_index,
                           const std::string& out_path = "");

void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

// Stream id for the (trace, window) pair, shared by every configuration
// simulated on that window (common random numbers).
uint64_t window_stream(size_t trace_index, size_t window_index);

}  // namespace avac
