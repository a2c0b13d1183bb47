#include "avac/controller.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace avac {

SimMetrics metrics_delta(const SimMetrics& after, const SimMetrics& before) {
  SimMetrics d;
  d.total_time_ns = after.total_time_ns - before.total_time_ns;
  d.stall_time_ns = after.stall_time_ns - before.stall_time_ns;
  d.rram_busy_ns = after.rram_busy_ns - before.rram_busy_ns;
  d.e_write = after.e_write - before.e_write;
  d.e_read = after.e_read - before.e_read;
  d.e_leak = after.e_leak - before.e_leak;
  d.e_buffer = after.e_buffer - before.e_buffer;
  d.counts.writes_coalesced =
      after.counts.writes_coalesced - before.counts.writes_coalesced;
  d.counts.wb_read_hits = after.counts.wb_read_hits - before.counts.wb_read_hits;
  d.counts.wb_write_merges =
      after.counts.wb_write_merges - before.counts.wb_write_merges;
  d.counts.rram_reads = after.counts.rram_reads - before.counts.rram_reads;
  d.counts.batches_flushed =
      after.counts.batches_flushed - before.counts.batches_flushed;
  return d;
}

SimMetrics simulate_reference(std::span<const MemoryAccess> accesses,
                              const DeviceParams& device) {
  if (accesses.empty())
    throw std::invalid_argument("simulate_reference: empty trace");
  device.validate();

  SimMetrics m;
  const WordCost rd = read_cost(device);
  // Worst-case pulse on every bit of the word: no write termination, and the
  // memory interface cannot know which bits already hold their target state.
  const double e_write_word =
      device.word_bits * device.v_prog * device.i_prog * (device.t_worst_ns * 1e-9);

  for (const auto& a : accesses) {
    m.total_time_ns += device.t_cpu_ns;
    if (a.kind == AccessKind::Write) {
      m.total_time_ns += device.t_worst_ns;
      m.stall_time_ns += device.t_worst_ns;
      m.rram_busy_ns += device.t_worst_ns;
      m.e_write += e_write_word;
    } else {
      m.total_time_ns += rd.time_ns;
      m.rram_busy_ns += rd.time_ns;
      m.e_read += rd.energy_j;
      ++m.counts.rram_reads;
    }
  }
  return m;
}

SimMetrics simulate_reference(const Trace& trace, const DeviceParams& device) {
  return simulate_reference(std::span<const MemoryAccess>(trace.accesses), device);
}

VacSimulator::VacSimulator(const ControllerConfig& config,
                           const DeviceParams& device, Rng rng)
    : config_(config), dev_(device), rng_(rng) {
  config_.validate();
  dev_.validate();
}

uint32_t VacSimulator::rram_word(uint32_t addr) const {
  auto it = rram_.find(addr);
  return it == rram_.end() ? 0u : it->second;
}

void VacSimulator::touch_occupancy(double t) {
  occ_integral_word_ns_ +=
      static_cast<double>(buffer_occupancy()) * (t - occ_mark_ns_);
  occ_mark_ns_ = t;
}

void VacSimulator::lock_and_flush(size_t count, double at) {
  assert(!flush_active_ && count >= 1 && count <= fifo_.size());
  double duration = 0.0;
  for (size_t i = 0; i < count; ++i) {
    uint32_t addr = fifo_.front();
    fifo_.pop_front();
    auto it = unlocked_.find(addr);
    assert(it != unlocked_.end());
    uint32_t data = it->second.data;
    unlocked_.erase(it);
    locked_.emplace_back(addr, data);
    WordCost c = word_write_cost(rram_word(addr), data, rng_, dev_);
    duration += c.time_ns;
    base_.e_write += c.energy_j;
  }
  base_.rram_busy_ns += duration;
  flush_active_ = true;
  flush_end_ns_ = at + duration;
}

void VacSimulator::maybe_lock(double at) {
  if (flush_active_) return;
  if (unlocked_.size() < static_cast<size_t>(config_.batch)) return;
  lock_and_flush(static_cast<size_t>(config_.batch), at);
}

void VacSimulator::complete_flushes_up_to(double t) {
  while (flush_active_ && flush_end_ns_ <= t) {
    touch_occupancy(flush_end_ns_);
    for (const auto& [addr, data] : locked_) rram_[addr] = data;
    base_.counts.writes_coalesced += locked_.size();
    ++base_.counts.batches_flushed;
    locked_.clear();
    flush_active_ = false;
    // The RRAM just turned idle; a waiting full batch locks immediately.
    maybe_lock(flush_end_ns_);
  }
}

void VacSimulator::on_write(uint32_t addr, uint32_t data) {
  if (auto it = unlocked_.find(addr); it != unlocked_.end()) {
    // In-place merge; insertion age is kept.
    it->second.data = data;
    now_ns_ += dev_.t_buffer_ns;
    base_.e_buffer += dev_.e_buffer_word;
    ++base_.counts.wb_write_merges;
    return;
  }
  if (buffer_occupancy() >= static_cast<size_t>(config_.wait_buffer)) {
    // Full buffer: with B <= W a flush is always in flight here.
    if (!flush_active_)
      throw std::logic_error("wait buffer full with no flush in flight");
    base_.stall_time_ns += flush_end_ns_ - now_ns_;
    now_ns_ = flush_end_ns_;
    complete_flushes_up_to(now_ns_);
  }
  touch_occupancy(now_ns_);
  unlocked_.emplace(addr, Entry{data});
  fifo_.push_back(addr);
  now_ns_ += dev_.t_buffer_ns;
  base_.e_buffer += dev_.e_buffer_word;
  maybe_lock(now_ns_);
}

void VacSimulator::on_read(uint32_t addr) {
  if (auto it = unlocked_.find(addr); it != unlocked_.end()) {
    now_ns_ += dev_.t_buffer_ns;
    base_.e_buffer += dev_.e_buffer_word;
    ++base_.counts.wb_read_hits;
    if (read_log) read_log->push_back(it->second.data);
    return;
  }
  if (flush_active_) {
    // Covers both a hit on the locked batch and a miss with the RRAM busy.
    read_buffer_.push_back({addr, now_ns_});
    assert(read_buffer_.size() == 1);
    base_.stall_time_ns += flush_end_ns_ - now_ns_;
    now_ns_ = flush_end_ns_;
    complete_flushes_up_to(now_ns_);
    read_buffer_.pop_front();
  }
  const WordCost rd = read_cost(dev_);
  now_ns_ += rd.time_ns;
  base_.e_read += rd.energy_j;
  ++base_.counts.rram_reads;
  if (read_log) read_log->push_back(rram_word(addr));
}

void VacSimulator::run(std::span<const MemoryAccess> accesses) {
  for (const auto& a : accesses) {
    now_ns_ += dev_.t_cpu_ns;
    complete_flushes_up_to(now_ns_);
    if (a.kind == AccessKind::Write) {
      on_write(a.address, a.data);
    } else {
      on_read(a.address);
    }
  }
}

void VacSimulator::drain() {
  for (;;) {
    if (flush_active_) {
      now_ns_ = std::max(now_ns_, flush_end_ns_);
      complete_flushes_up_to(now_ns_);
      continue;
    }
    if (unlocked_.empty()) break;
    size_t count =
        std::min(unlocked_.size(), static_cast<size_t>(config_.batch));
    lock_and_flush(count, now_ns_);
  }
  touch_occupancy(now_ns_);
}

void VacSimulator::set_config(const ControllerConfig& config) {
  config.validate();
  // Lines to be gated off must be empty first.
  while (buffer_occupancy() > static_cast<size_t>(config.wait_buffer)) {
    if (flush_active_) {
      base_.stall_time_ns += std::max(0.0, flush_end_ns_ - now_ns_);
      now_ns_ = std::max(now_ns_, flush_end_ns_);
      complete_flushes_up_to(now_ns_);
      continue;
    }
    size_t count = std::min(unlocked_.size(), static_cast<size_t>(config.batch));
    lock_and_flush(count, now_ns_);
  }
  config_ = config;
  maybe_lock(now_ns_);
}

SimMetrics VacSimulator::metrics() const {
  SimMetrics m = base_;
  m.total_time_ns = now_ns_;
  double occ_integral = occ_integral_word_ns_ +
                        static_cast<double>(buffer_occupancy()) *
                            (now_ns_ - occ_mark_ns_);
  m.e_leak = leakage_energy(1.0, occ_integral, dev_);
  return m;
}

SimMetrics simulate_vac(const Trace& trace, const ControllerConfig& config,
                        const DeviceParams& device, Rng rng,
                        std::vector<uint32_t>* read_log) {
  if (trace.empty()) throw std::invalid_argument("simulate_vac: empty trace");
  VacSimulator sim(config, device, rng);
  sim.read_log = read_log;
  sim.run(trace.accesses);
  sim.drain();
  return sim.metrics();
}

Gains compute_gains(const SimMetrics& vac, const SimMetrics& ref) {
  if (!(ref.total_time_ns > 0.0))
    throw std::invalid_argument("compute_gains: reference time must be > 0");
  if (!(ref.total_energy() > 0.0))
    throw std::invalid_argument("compute_gains: reference energy must be > 0");
  Gains g;
  g.pg = (ref.total_time_ns - vac.total_time_ns) / ref.total_time_ns;
  g.eg = (ref.total_energy() - vac.total_energy()) / ref.total_energy();
  return g;
}

IntervalRun simulate_intervals(const Trace& trace, ControllerConfig initial,
                               size_t interval, const TunerCallback* tuner,
                               const DeviceParams& device, Rng rng) {
  if (interval < 1)
    throw std::invalid_argument("simulate_intervals: interval must be >= 1");
  if (trace.empty())
    throw std::invalid_argument("simulate_intervals: empty trace");

  FeatureNormalizers norms;
  norms.burst_scale = static_cast<double>(interval);
  norms.rep_scale = static_cast<double>(interval);

  IntervalRun out;
  VacSimulator sim(initial, device, rng);
  const size_t n = trace.size();
  for (size_t begin = 0; begin < n; begin += interval) {
    size_t len = std::min(interval, n - begin);
    std::span<const MemoryAccess> window(trace.accesses.data() + begin, len);
    bool last = begin + len >= n;

    SimMetrics before = sim.metrics();
    ControllerConfig used = sim.config();
    sim.run(window);
    if (last) sim.drain();
    SimMetrics vac_window = metrics_delta(sim.metrics(), before);
    SimMetrics ref_window = simulate_reference(window, device);
    Gains g = compute_gains(vac_window, ref_window);

    RawFeatures raw = extract_features(window);
    IntervalResult res;
    res.fv = build_feature_vector(raw, used, norms);
    res.config = used;
    res.pg = g.pg;
    res.eg = g.eg;
    out.intervals.push_back(res);

    if (tuner && *tuner && !last) sim.set_config((*tuner)(raw, used));
  }
  out.aggregate = sim.metrics();
  return out;
}

}  // namespace avac
