#include "avac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace avac {

namespace {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

uint64_t salt_seed(uint64_t base, size_t index) {
  return base ^ (0x9E3779B97F4A7C15ull * (static_cast<uint64_t>(index) + 1));
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment.traces", "experiment.interval_size", "experiment.static_w",
      "experiment.static_b", "experiment.seed", "experiment.output_dir",
      "experiment.trace_length",
      "device.v_prog", "device.i_prog", "device.t_worst_ns", "device.mu_ns",
      "device.sigma_ns", "device.t_detect_ns", "device.e_read_bit",
      "device.i_leak_bit", "device.word_bits", "device.t_read_ns",
      "device.t_buffer_ns", "device.e_buffer_word", "device.t_cpu_ns",
      "tuner.alpha", "tuner.beta", "tuner.learning_rate", "tuner.momentum",
      "tuner.max_iters", "tuner.tol", "tuner.multi_start", "tuner.enabled",
      "train.grid_w_stride", "train.grid_b_stride", "train.ridge",
      "train.degree"};
  return keys;
}

}  // namespace

uint64_t window_stream(size_t trace_index, size_t window_index) {
  return (static_cast<uint64_t>(trace_index) << 32) |
         (static_cast<uint64_t>(window_index) & 0xFFFFFFFFull);
}

ExperimentConfig ExperimentConfig::from_config(const ConfigFile& cf) {
  for (const auto& [key, value] : cf.values()) {
    (void)value;
    if (!known_keys().count(key))
      throw std::runtime_error("config: unknown key '" + key + "'");
  }

  ExperimentConfig c;
  c.trace_specs = cf.get_list("experiment.traces");
  c.interval = static_cast<size_t>(cf.get_long("experiment.interval_size", 1000));
  c.static_config.wait_buffer =
      static_cast<int>(cf.get_long("experiment.static_w", 80));
  c.static_config.batch = static_cast<int>(cf.get_long("experiment.static_b", 10));
  c.seed = cf.get_u64("experiment.seed", 42);
  c.output_dir = cf.get_string("experiment.output_dir", "out");
  c.default_trace_length =
      static_cast<size_t>(cf.get_long("experiment.trace_length", 4000));

  c.device.v_prog = cf.get_double("device.v_prog", c.device.v_prog);
  c.device.i_prog = cf.get_double("device.i_prog", c.device.i_prog);
  c.device.t_worst_ns = cf.get_double("device.t_worst_ns", c.device.t_worst_ns);
  c.device.mu_ns = cf.get_double("device.mu_ns", c.device.mu_ns);
  c.device.sigma_ns = cf.get_double("device.sigma_ns", c.device.sigma_ns);
  c.device.t_detect_ns = cf.get_double("device.t_detect_ns", c.device.t_detect_ns);
  c.device.e_read_bit = cf.get_double("device.e_read_bit", c.device.e_read_bit);
  c.device.i_leak_bit = cf.get_double("device.i_leak_bit", c.device.i_leak_bit);
  c.device.word_bits = static_cast<int>(cf.get_long("device.word_bits", c.device.word_bits));
  c.device.t_read_ns = cf.get_double("device.t_read_ns", c.device.t_read_ns);
  c.device.t_buffer_ns = cf.get_double("device.t_buffer_ns", c.device.t_buffer_ns);
  c.device.e_buffer_word =
      cf.get_double("device.e_buffer_word", c.device.e_buffer_word);
  c.device.t_cpu_ns = cf.get_double("device.t_cpu_ns", c.device.t_cpu_ns);

  c.tuner.alpha = cf.get_double("tuner.alpha", c.tuner.alpha);
  c.tuner.beta = cf.get_double("tuner.beta", c.tuner.beta);
  c.tuner.learning_rate = cf.get_double("tuner.learning_rate", c.tuner.learning_rate);
  c.tuner.momentum = cf.get_double("tuner.momentum", c.tuner.momentum);
  c.tuner.max_iters = static_cast<int>(cf.get_long("tuner.max_iters", c.tuner.max_iters));
  c.tuner.tol = cf.get_double("tuner.tol", c.tuner.tol);
  c.tuner.multi_start = static_cast<int>(cf.get_long("tuner.multi_start", c.tuner.multi_start));
  c.tuner_enabled = cf.get_bool("tuner.enabled", true);
  c.tuner.baseline = c.static_config;

  c.grid_w_stride = static_cast<int>(cf.get_long("train.grid_w_stride", 10));
  c.grid_b_stride = static_cast<int>(cf.get_long("train.grid_b_stride", 5));
  c.ridge = cf.get_double("train.ridge", 1e-3);
  c.degree = static_cast<int>(cf.get_long("train.degree", 5));

  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_config(ConfigFile::load(path));
}

void ExperimentConfig::validate() const {
  if (interval < 1)
    throw std::invalid_argument("experiment: interval_size must be >= 1");
  if (default_trace_length < 1)
    throw std::invalid_argument("experiment: trace_length must be >= 1");
  static_config.validate();
  device.validate();
  tuner.validate();
  if (grid_w_stride < 1 || grid_b_stride < 1)
    throw std::invalid_argument("train: grid strides must be >= 1");
  if (ridge < 0.0) throw std::invalid_argument("train: ridge must be >= 0");
  if (degree != 3 && degree != 5)
    throw std::invalid_argument("train: degree must be 3 or 5");
}

const std::map<std::string, SyntheticProfile>& builtin_profiles() {
  static const std::map<std::string, SyntheticProfile> profiles = [] {
    std::map<std::string, SyntheticProfile> m;
    auto mk = [](double rf, double rl, double wl, double rb, double wb,
                 double spread) {
      SyntheticProfile p;
      p.read_fraction = rf;
      p.read_locality = rl;
      p.write_locality = wl;
      p.mean_read_burst = rb;
      p.mean_write_burst = wb;
      p.bit_change_spread = spread;
      return p;
    };
    // Write-heavy streaming kernels with little address reuse.
    m["cs"] = mk(0.20, 0.05, 0.05, 2, 8, 0.90);
    m["fe"] = mk(0.25, 0.10, 0.10, 2, 6, 0.80);
    // Heavy address repetition, long bursts, LSB-leaning bit changes.
    m["dt"] = mk(0.45, 0.70, 0.75, 9, 11, 0.35);
    // dt behind a small cache: repeats absorbed, locality drops.
    m["dt_c"] = mk(0.30, 0.30, 0.35, 3, 7, 0.50);
    m["mm"] = mk(0.50, 0.12, 0.12, 5, 5, 0.70);
    m["conv"] = mk(0.50, 0.55, 0.50, 10, 10, 0.60);
    m["sysbench"] = mk(0.60, 0.75, 0.70, 6, 4, 0.50);
    m["apache"] = mk(0.60, 0.15, 0.12, 3, 2, 0.85);
    return m;
  }();
  return profiles;
}

std::vector<SyntheticProfile> staged_stages(const std::string& name,
                                            size_t total_length,
                                            uint64_t seed) {
  if (name != "healthfog")
    throw std::runtime_error("unknown staged workload: " + name);
  if (total_length < 3)
    throw std::invalid_argument("staged workload needs length >= 3");
  size_t third = total_length / 3;

  SyntheticProfile t1;  // sensor readout: reads only
  t1.read_fraction = 1.0;
  t1.read_locality = 0.5;
  t1.mean_read_burst = 16;
  t1.length = third;
  t1.seed = salt_seed(seed, 1);

  SyntheticProfile t2 = builtin_profiles().at("conv");  // scheduling stage
  t2.length = third;
  t2.seed = salt_seed(seed, 2);

  SyntheticProfile t3;  // inference stage, mm/dt mix
  t3.read_fraction = 0.47;
  t3.read_locality = 0.45;
  t3.write_locality = 0.50;
  t3.mean_read_burst = 7;
  t3.mean_write_burst = 8;
  t3.bit_change_spread = 0.5;
  t3.length = total_length - 2 * third;
  t3.seed = salt_seed(seed, 3);

  return {t1, t2, t3};
}

Trace materialize_trace(const std::string& spec, size_t default_length,
                        uint64_t base_seed, size_t index) {
  auto parts = split(spec, ':');
  if (parts.empty()) throw std::runtime_error("empty trace spec");

  const std::string& kind = parts[0];
  if (kind == "file") {
    if (parts.size() != 2)
      throw std::runtime_error("bad trace spec (want file:<path>): " + spec);
    return parse_trace(parts[1]);
  }
  if (kind == "profile" || kind == "staged") {
    if (parts.size() < 2 || parts.size() > 4)
      throw std::runtime_error("bad trace spec: " + spec);
    const std::string& name = parts[1];
    size_t length = default_length;
    uint64_t seed = salt_seed(base_seed, index);
    if (parts.size() >= 3 && !parts[2].empty())
      length = static_cast<size_t>(std::stoull(parts[2]));
    if (parts.size() == 4 && !parts[3].empty())
      seed = std::stoull(parts[3]);
    if (kind == "profile") {
      auto it = builtin_profiles().find(name);
      if (it == builtin_profiles().end())
        throw std::runtime_error("unknown profile: " + name);
      SyntheticProfile p = it->second;
      p.length = length;
      p.seed = seed;
      return generate_synthetic(p, name);
    }
    return staged_trace(staged_stages(name, length, seed), name);
  }
  // Bare spec: treat as a file path.
  return parse_trace(spec);
}

std::vector<ControllerConfig> training_grid(int w_stride, int b_stride,
                                            bool full_grid) {
  std::vector<int> ws, bs;
  if (full_grid) {
    for (int w = 1; w <= kWaitBufferMax; ++w) ws.push_back(w);
    for (int b = 1; b <= kBatchMax; ++b) bs.push_back(b);
  } else {
    for (int w = 1; w <= kWaitBufferMax; w += w_stride) ws.push_back(w);
    if (ws.back() != kWaitBufferMax) ws.push_back(kWaitBufferMax);
    for (int b = 1; b <= kBatchMax; b += b_stride) bs.push_back(b);
    if (bs.back() != kBatchMax) bs.push_back(kBatchMax);
  }
  std::vector<ControllerConfig> grid;
  grid.reserve(ws.size() * bs.size());
  for (int w : ws)
    for (int b : bs) grid.push_back({w, std::min(b, w)});  // effective config
  return grid;
}

namespace {

SimMetrics run_window(std::span<const MemoryAccess> window,
                      const ControllerConfig& config, const DeviceParams& dev,
                      Rng rng) {
  VacSimulator sim(config, dev, rng);
  sim.run(window);
  sim.drain();
  return sim.metrics();
}

struct WindowRef {
  std::span<const MemoryAccess> span;
  SimMetrics ref;
  RawFeatures raw;
};

std::vector<WindowRef> window_refs(const Trace& trace, size_t interval,
                                   const DeviceParams& dev) {
  std::vector<WindowRef> out;
  for (size_t begin = 0; begin < trace.size(); begin += interval) {
    size_t len = std::min(interval, trace.size() - begin);
    std::span<const MemoryAccess> w(trace.accesses.data() + begin, len);
    out.push_back({w, simulate_reference(w, dev), extract_features(w)});
  }
  return out;
}

}  // namespace

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "fv0,fv1,fv2,fv3,fv4,fv5,fv6,fv7,fv8,fv9,pg,eg\n";
  for (size_t i = 0; i < data.size(); ++i) {
    for (double v : data.fv[i]) out << fmt_g17(v) << ",";
    out << fmt_g17(data.pg[i]) << "," << fmt_g17(data.eg[i]) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  Dataset d;
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("dataset file is empty: " + path);
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 12)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 12 columns");
    FeatureVector fv;
    for (size_t k = 0; k < 10; ++k) fv[k] = std::stod(cells[k]);
    d.fv.push_back(fv);
    d.pg.push_back(std::stod(cells[10]));
    d.eg.push_back(std::stod(cells[11]));
  }
  d.validate();
  return d;
}

std::vector<std::string> default_trace_specs() {
  // The application profiles plus the staged workload, so the models see
  // read-only and stage-boundary windows too.
  std::vector<std::string> specs;
  for (const auto& [name, _] : builtin_profiles())
    specs.push_back("profile:" + name);
  specs.push_back("staged:healthfog:9000");
  return specs;
}

TrainResult train_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::string> specs = cfg.trace_specs;
  if (specs.empty()) specs = default_trace_specs();

  std::vector<Trace> traces;
  for (size_t i = 0; i < specs.size(); ++i)
    traces.push_back(
        materialize_trace(specs[i], cfg.default_trace_length, cfg.seed, i));

  const std::vector<ControllerConfig> grid =
      training_grid(cfg.grid_w_stride, cfg.grid_b_stride);

  struct Job {
    size_t trace, window, cell;
  };
  std::vector<Job> jobs;
  std::vector<std::vector<WindowRef>> refs(traces.size());
  for (size_t t = 0; t < traces.size(); ++t) {
    refs[t] = window_refs(traces[t], cfg.interval, cfg.device);
    for (size_t w = 0; w < refs[t].size(); ++w)
      for (size_t c = 0; c < grid.size(); ++c) jobs.push_back({t, w, c});
  }

  FeatureNormalizers norms;
  norms.burst_scale = static_cast<double>(cfg.interval);
  norms.rep_scale = static_cast<double>(cfg.interval);

  Dataset data;
  data.fv.resize(jobs.size());
  data.pg.resize(jobs.size());
  data.eg.resize(jobs.size());

  // Row order is fixed by the job list, so parallel filling is reproducible.
#pragma omp parallel for schedule(dynamic)
  for (size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    const WindowRef& wr = refs[job.trace][job.window];
    const ControllerConfig& cell = grid[job.cell];
    Rng rng(cfg.seed, window_stream(job.trace, job.window));
    SimMetrics vac = run_window(wr.span, cell, cfg.device, rng);
    Gains g = compute_gains(vac, wr.ref);
    data.fv[j] = build_feature_vector(wr.raw, cell, norms);
    data.pg[j] = g.pg;
    data.eg[j] = g.eg;
  }

  TrainResult result;
  auto [pg3, eg3] = fit_models(data, 3, cfg.ridge, norms, &result.report_d3);
  auto [pg5, eg5] = fit_models(data, 5, cfg.ridge, norms, &result.report_d5);
  std::cout << "training rows: " << data.size() << "\n"
            << "degree 3: PG RMSE " << result.report_d3.rmse_pg << ", EG RMSE "
            << result.report_d3.rmse_eg << "\n"
            << "degree 5: PG RMSE " << result.report_d5.rmse_pg << ", EG RMSE "
            << result.report_d5.rmse_eg << "\n";

  result.pg_model = cfg.degree == 3 ? std::move(pg3) : std::move(pg5);
  result.eg_model = cfg.degree == 3 ? std::move(eg3) : std::move(eg5);

  std::filesystem::create_directories(cfg.output_dir);
  result.dataset_path = cfg.output_dir + "/dataset.csv";
  result.pg_path = cfg.output_dir + "/pg_model.json";
  result.eg_path = cfg.output_dir + "/eg_model.json";
  write_dataset_csv(data, result.dataset_path);
  save_model(result.pg_model, result.pg_path);
  save_model(result.eg_model, result.eg_path);
  result.dataset = std::move(data);
  return result;
}

namespace {

std::vector<IntervalRecord> interval_records(const IntervalRun& run,
                                             const TunerParams& tp) {
  std::vector<IntervalRecord> out;
  out.reserve(run.intervals.size());
  for (size_t i = 0; i < run.intervals.size(); ++i) {
    const IntervalResult& r = run.intervals[i];
    out.push_back({i, r.config, r.pg, r.eg, tp.alpha * r.pg + tp.beta * r.eg});
  }
  return out;
}

double sum_rewards(const std::vector<IntervalRecord>& recs) {
  double s = 0.0;
  for (const auto& r : recs) s += r.reward;
  return s;
}

}  // namespace

GainReport eval_pipeline(const ExperimentConfig& cfg,
                         const std::string& models_dir) {
  cfg.validate();
  PolyModel pg_model = load_model(models_dir + "/pg_model.json");
  PolyModel eg_model = load_model(models_dir + "/eg_model.json");
  if (pg_model.target != "PG" || eg_model.target != "EG")
    throw std::runtime_error("eval: model files have swapped targets");
  if (pg_model.dimension != 10 || eg_model.dimension != 10 ||
      pg_model.degree != eg_model.degree ||
      !(pg_model.normalizers == eg_model.normalizers))
    throw std::runtime_error("eval: PG and EG models do not match");

  std::vector<std::string> specs = cfg.trace_specs;
  if (specs.empty()) specs = default_trace_specs();

  TunerParams tp = cfg.tuner;
  tp.baseline = cfg.static_config;
  TunerCallback tuner_cb = [&](const RawFeatures& raw,
                               const ControllerConfig& cur) {
    return optimize(pg_model, eg_model, raw, cur, tp);
  };

  GainReport report;
  for (size_t t = 0; t < specs.size(); ++t) {
    Trace trace =
        materialize_trace(specs[t], cfg.default_trace_length, cfg.seed, t);
    const uint64_t stream = window_stream(t, 0);

    SimMetrics ref = simulate_reference(trace, cfg.device);
    IntervalRun st = simulate_intervals(trace, cfg.static_config, cfg.interval,
                                        nullptr, cfg.device,
                                        Rng(cfg.seed, stream));
    IntervalRun ad = simulate_intervals(
        trace, cfg.static_config, cfg.interval,
        cfg.tuner_enabled ? &tuner_cb : nullptr, cfg.device,
        Rng(cfg.seed, stream));

    Gains gs = compute_gains(st.aggregate, ref);
    Gains ga = compute_gains(ad.aggregate, ref);

    TraceGains tg;
    tg.trace = trace.name;
    tg.pg_static = gs.pg;
    tg.eg_static = gs.eg;
    tg.pg_adaptive = ga.pg;
    tg.eg_adaptive = ga.eg;
    tg.reward_static = tp.alpha * gs.pg + tp.beta * gs.eg;
    tg.reward_adaptive = tp.alpha * ga.pg + tp.beta * ga.eg;
    tg.static_intervals = interval_records(st, tp);
    tg.adaptive_intervals = interval_records(ad, tp);
    tg.cum_reward_static = sum_rewards(tg.static_intervals);
    tg.cum_reward_adaptive = sum_rewards(tg.adaptive_intervals);
    report.traces.push_back(std::move(tg));
  }

  std::filesystem::create_directories(cfg.output_dir);
  report.json_path = cfg.output_dir + "/gains.json";
  report.gains_csv_path = cfg.output_dir + "/gains.csv";
  report.intervals_csv_path = cfg.output_dir + "/intervals.csv";

  nlohmann::json j;
  j["interval_size"] = cfg.interval;
  j["static_w"] = cfg.static_config.wait_buffer;
  j["static_b"] = cfg.static_config.batch;
  j["alpha"] = tp.alpha;
  j["beta"] = tp.beta;
  j["traces"] = nlohmann::json::array();
  for (const auto& tg : report.traces) {
    nlohmann::json jt;
    jt["trace"] = tg.trace;
    jt["pg_static"] = tg.pg_static;
    jt["eg_static"] = tg.eg_static;
    jt["pg_adaptive"] = tg.pg_adaptive;
    jt["eg_adaptive"] = tg.eg_adaptive;
    jt["reward_static"] = tg.reward_static;
    jt["reward_adaptive"] = tg.reward_adaptive;
    jt["cum_reward_static"] = tg.cum_reward_static;
    jt["cum_reward_adaptive"] = tg.cum_reward_adaptive;
    jt["intervals"] = nlohmann::json::array();
    for (const auto& ir : tg.adaptive_intervals) {
      jt["intervals"].push_back({{"index", ir.index},
                                 {"w", ir.config.wait_buffer},
                                 {"b", ir.config.batch},
                                 {"pg", ir.pg},
                                 {"eg", ir.eg},
                                 {"reward", ir.reward}});
    }
    j["traces"].push_back(std::move(jt));
  }
  {
    std::ofstream out(report.json_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + report.json_path);
    out << j.dump(2) << "\n";
  }
  {
    std::ofstream out(report.gains_csv_path);
    if (!out)
      throw std::runtime_error("cannot open for writing: " + report.gains_csv_path);
    out << "trace,pg_static,eg_static,pg_adaptive,eg_adaptive,"
           "reward_static,reward_adaptive,cum_reward_static,cum_reward_adaptive\n";
    for (const auto& tg : report.traces) {
      out << tg.trace << "," << fmt_g17(tg.pg_static) << ","
          << fmt_g17(tg.eg_static) << "," << fmt_g17(tg.pg_adaptive) << ","
          << fmt_g17(tg.eg_adaptive) << "," << fmt_g17(tg.reward_static) << ","
          << fmt_g17(tg.reward_adaptive) << "," << fmt_g17(tg.cum_reward_static)
          << "," << fmt_g17(tg.cum_reward_adaptive) << "\n";
    }
  }
  {
    std::ofstream out(report.intervals_csv_path);
    if (!out)
      throw std::runtime_error("cannot open for writing: " +
                               report.intervals_csv_path);
    out << "trace,mode,interval,w,b,pg,eg,reward\n";
    for (const auto& tg : report.traces) {
      auto dump = [&](const char* mode, const std::vector<IntervalRecord>& recs) {
        for (const auto& ir : recs) {
          out << tg.trace << "," << mode << "," << ir.index << ","
              << ir.config.wait_buffer << "," << ir.config.batch << ","
              << fmt_g17(ir.pg) << "," << fmt_g17(ir.eg) << ","
              << fmt_g17(ir.reward) << "\n";
        }
      };
      dump("static", tg.static_intervals);
      dump("adaptive", tg.adaptive_intervals);
    }
  }
  return report;
}

std::vector<SweepRow> sweep_window(const Trace& trace, size_t window_index,
                                   size_t interval,
                                   const std::vector<ControllerConfig>& grid,
                                   const DeviceParams& device, uint64_t seed,
                                   uint64_t stream, bool parallel) {
  size_t begin = window_index * interval;
  if (begin >= trace.size())
    throw std::invalid_argument("sweep: window index out of range");
  size_t len = std::min(interval, trace.size() - begin);
  std::span<const MemoryAccess> window(trace.accesses.data() + begin, len);
  SimMetrics ref = simulate_reference(window, device);

  std::vector<SweepRow> rows(grid.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < grid.size(); ++i) {
      Rng rng(seed, stream);
      Gains g = compute_gains(run_window(window, grid[i], device, rng), ref);
      rows[i] = {grid[i], g.pg, g.eg};
    }
  } else {
    for (size_t i = 0; i < grid.size(); ++i) {
      Rng rng(seed, stream);
      Gains g = compute_gains(run_window(window, grid[i], device, rng), ref);
      rows[i] = {grid[i], g.pg, g.eg};
    }
  }
  return rows;
}

std::string sweep_pipeline(const ExperimentConfig& cfg,
                           const std::string& trace_spec, bool full_grid,
                           size_t window_index, const std::string& out_path) {
  cfg.validate();
  Trace trace = materialize_trace(trace_spec, cfg.default_trace_length, cfg.seed, 0);
  auto grid = training_grid(cfg.grid_w_stride, cfg.grid_b_stride, full_grid);
  auto rows = sweep_window(trace, window_index, cfg.interval, grid, cfg.device,
                           cfg.seed, window_stream(0, window_index));

  std::string path = out_path;
  if (path.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::string base = trace.name;
    std::replace(base.begin(), base.end(), '/', '_');
    path = cfg.output_dir + "/sweep_" + base + "_w" +
           std::to_string(window_index) + ".csv";
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "w,b,pg,eg\n";
  for (const auto& r : rows)
    out << r.config.wait_buffer << "," << r.config.batch << ","
        << fmt_g17(r.pg) << "," << fmt_g17(r.eg) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
  return path;
}

}  // namespace avac
