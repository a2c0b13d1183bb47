#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace avac {

enum class AccessKind : uint8_t { Read, Write };

struct MemoryAccess {
  AccessKind kind;
  uint32_t address;
  uint32_t data;  // meaningful only when kind == Write

  bool operator==(const MemoryAccess& o) const {
    return kind == o.kind && address == o.address &&
           (kind == AccessKind::Read || data == o.data);
  }
};

struct Trace {
  std::string name;
  std::vector<MemoryAccess> accesses;
  // Cumulative end indices of stages, for staged traces; empty otherwise.
  std::vector<size_t> stage_ends;

  size_t size() const { return accesses.size(); }
  bool empty() const { return accesses.empty(); }
};

// Text format: '#' starts a comment, "R 0x<addr>" is a read,
// "W 0x<addr> 0x<data>" is a write. Addresses must fit `address_bits`.
Trace parse_trace(const std::string& path, int address_bits = 32);
Trace parse_trace_stream(std::istream& in, const std::string& name,
                         int address_bits = 32);
void write_trace(const Trace& t, const std::string& path);
void write_trace_stream(const Trace& t, std::ostream& out);

// Target characteristics for synthetic trace generation. Locality of a kind is
// the expected fraction of accesses that reuse an earlier address of the same
// kind, so measured 1 - unique/total tracks it, and repetition follows as
// 1/(1-locality); when a repetition target above that is given, the larger
// implied locality wins. Read fraction is met exactly (quota); burst means are
// met when consistent with it (any two-kind stream forces
// read_fraction = read_burst / (read_burst + write_burst)).
struct SyntheticProfile {
  double read_fraction = 0.5;     // in [0,1]
  double read_locality = 0.0;     // in [0,1)
  double write_locality = 0.0;    // in [0,1)
  double mean_read_burst = 1.0;   // >= 1
  double mean_write_burst = 1.0;  // >= 1
  double mean_read_rep = 1.0;     // >= 1
  double mean_write_rep = 1.0;    // >= 1
  double bit_change_spread = 1.0;  // 1 = toggles spread over all bits, 0 = LSB-heavy
  uint64_t address_space_size = 1ull << 20;
  size_t length = 1000;
  uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

Trace generate_synthetic(const SyntheticProfile& profile,
                         std::string name = "synthetic");

// Concatenation of per-stage synthetic traces; stage boundaries recorded in
// stage_ends.
Trace staged_trace(const std::vector<SyntheticProfile>& stages,
                   std::string name = "staged");

}  // namespace avac
