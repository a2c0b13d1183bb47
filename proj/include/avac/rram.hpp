#pragma once

#include <cstdint>
#include <span>

#include "avac/rng.hpp"

namespace avac {

// RRAM device timing and energy constants. Times are in nanoseconds, energies
// in joules, currents in amperes, voltages in volts.
struct DeviceParams {
  double v_prog = 1.0;         // programming voltage
  double i_prog = 100e-6;      // programming current per switching bit
  double t_worst_ns = 50.0;    // worst-case programming time
  double mu_ns = 25.0;         // switch-time distribution mean
  double sigma_ns = 5.0;       // switch-time distribution std deviation
  double t_detect_ns = 1.0;    // write-termination detection delay
  double e_read_bit = 1e-12;   // read energy per bit
  double i_leak_bit = 15e-9;   // leakage current per powered bit cell
  int word_bits = 32;

  // Costs the device tables leave open; defaults keep buffer accesses cheaper
  // than RRAM accesses.
  double t_read_ns = 10.0;       // RRAM word read latency
  double t_buffer_ns = 1.0;      // wait-buffer word access latency
  double e_buffer_word = 1e-13;  // wait-buffer word access energy
  double t_cpu_ns = 10.0;        // processor issue period

  void validate() const;  // throws std::invalid_argument on bad fields

  double word_leak_watts() const { return v_prog * i_leak_bit * word_bits; }
  uint32_t word_mask() const {
    return word_bits >= 32 ? 0xFFFFFFFFu : ((1u << word_bits) - 1u);
  }
};

struct WordCost {
  double time_ns = 0.0;
  double energy_j = 0.0;
};

// One switch-time draw from Normal(mu, sigma^2) truncated to (0, t_worst].
double sample_switch_time_ns(Rng& rng, const DeviceParams& p);

// Cost of programming `new_word` over `old_word`: every transitioning bit
// draws its own switch time; write termination cuts the current at the switch,
// so bit energy is v * i * t_k and the word completes at max(t_k) + t_detect.
// No transitions: time = t_detect, energy = 0.
WordCost word_write_cost(uint32_t old_word, uint32_t new_word, Rng& rng,
                         const DeviceParams& p);

// Same cost formula over caller-supplied per-bit-position switch times
// (indexed by bit). Lets tests share samples across transition subsets.
WordCost word_write_cost_from_times(uint32_t old_word, uint32_t new_word,
                                    std::span<const double> bit_switch_ns,
                                    const DeviceParams& p);

// Fixed RRAM word read cost.
WordCost read_cost(const DeviceParams& p);

// Leakage energy of `active_words` powered word-lines over `duration_ns`.
// `active_words` may be fractional (time-weighted occupancy).
double leakage_energy(double active_words, double duration_ns,
                      const DeviceParams& p);

}  // namespace avac
