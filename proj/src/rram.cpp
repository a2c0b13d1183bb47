#include "avac/rram.hpp"

#include <algorithm>
#include <stdexcept>

namespace avac {

void DeviceParams::validate() const {
  if (!(t_worst_ns > 0.0)) throw std::invalid_argument("device: t_worst must be > 0");
  if (!(mu_ns > 0.0) || !(mu_ns < t_worst_ns))
    throw std::invalid_argument("device: require 0 < mu < t_worst");
  if (!(sigma_ns > 0.0)) throw std::invalid_argument("device: sigma must be > 0");
  if (t_detect_ns < 0.0) throw std::invalid_argument("device: t_detect must be >= 0");
  if (v_prog < 0.0 || i_prog < 0.0 || i_leak_bit < 0.0)
    throw std::invalid_argument("device: voltages and currents must be >= 0");
  if (e_read_bit < 0.0 || e_buffer_word < 0.0)
    throw std::invalid_argument("device: energies must be >= 0");
  if (word_bits < 1 || word_bits > 32)
    throw std::invalid_argument("device: word_bits must be in [1,32]");
  if (t_read_ns < 0.0 || t_buffer_ns < 0.0)
    throw std::invalid_argument("device: access latencies must be >= 0");
  if (!(t_cpu_ns > 0.0)) throw std::invalid_argument("device: t_cpu must be > 0");
}

double sample_switch_time_ns(Rng& rng, const DeviceParams& p) {
  for (;;) {
    double t = rng.normal(p.mu_ns, p.sigma_ns);
    if (t > 0.0 && t <= p.t_worst_ns) return t;
  }
}

WordCost word_write_cost(uint32_t old_word, uint32_t new_word, Rng& rng,
                         const DeviceParams& p) {
  uint32_t diff = (old_word ^ new_word) & p.word_mask();
  WordCost c;
  double t_max = 0.0;
  while (diff != 0) {
    diff &= diff - 1;  // one draw per transitioning bit, ascending order
    double t = sample_switch_time_ns(rng, p);
    c.energy_j += p.v_prog * p.i_prog * (t * 1e-9);
    t_max = std::max(t_max, t);
  }
  c.time_ns = t_max + p.t_detect_ns;
  return c;
}

WordCost word_write_cost_from_times(uint32_t old_word, uint32_t new_word,
                                    std::span<const double> bit_switch_ns,
                                    const DeviceParams& p) {
  uint32_t diff = (old_word ^ new_word) & p.word_mask();
  WordCost c;
  double t_max = 0.0;
  for (int bit = 0; bit < p.word_bits; ++bit) {
    if ((diff >> bit) & 1u) {
      double t = bit_switch_ns[static_cast<size_t>(bit)];
      c.energy_j += p.v_prog * p.i_prog * (t * 1e-9);
      t_max = std::max(t_max, t);
    }
  }
  c.time_ns = t_max + p.t_detect_ns;
  return c;
}

WordCost read_cost(const DeviceParams& p) {
  return {p.t_read_ns, p.e_read_bit * p.word_bits};
}

double leakage_energy(double active_words, double duration_ns,
                      const DeviceParams& p) {
  return p.word_leak_watts() * active_words * (duration_ns * 1e-9);
}

}  // namespace avac
