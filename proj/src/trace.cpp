#include "avac/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "avac/rng.hpp"

namespace avac {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(const std::string& name, size_t line,
                             const std::string& msg) {
  throw std::runtime_error("trace parse error: " + name + ":" +
                           std::to_string(line) + ": " + msg);
}

uint64_t parse_hex(std::string_view tok, uint64_t limit, const std::string& name,
                   size_t line, const char* what) {
  if (tok.size() < 3 || tok[0] != '0' || (tok[1] != 'x' && tok[1] != 'X'))
    parse_fail(name, line, std::string("expected 0x-prefixed hex ") + what);
  uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(tok.data() + 2, tok.data() + tok.size(), value, 16);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    parse_fail(name, line, std::string("malformed hex ") + what);
  if (value > limit)
    parse_fail(name, line, std::string(what) + " out of range");
  return value;
}

}  // namespace

Trace parse_trace_stream(std::istream& in, const std::string& name,
                         int address_bits) {
  if (address_bits < 1 || address_bits > 32)
    throw std::invalid_argument("parse_trace: address_bits must be in [1,32]");
  const uint64_t addr_limit =
      address_bits == 32 ? 0xFFFFFFFFull : ((1ull << address_bits) - 1);

  Trace t;
  t.name = name;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body(line);
    if (auto pos = body.find('#'); pos != std::string_view::npos)
      body = body.substr(0, pos);
    body = trim(body);
    if (body.empty()) continue;

    std::istringstream ls(std::string{body});
    std::string kind, a_tok, d_tok, extra;
    ls >> kind >> a_tok;
    if (kind == "R") {
      if (a_tok.empty()) parse_fail(name, lineno, "read line missing address");
      if (ls >> extra) parse_fail(name, lineno, "unexpected token after read");
      uint32_t addr = static_cast<uint32_t>(
          parse_hex(a_tok, addr_limit, name, lineno, "address"));
      t.accesses.push_back({AccessKind::Read, addr, 0});
    } else if (kind == "W") {
      if (a_tok.empty()) parse_fail(name, lineno, "write line missing address");
      if (!(ls >> d_tok)) parse_fail(name, lineno, "write line missing data");
      if (ls >> extra) parse_fail(name, lineno, "unexpected token after write");
      uint32_t addr = static_cast<uint32_t>(
          parse_hex(a_tok, addr_limit, name, lineno, "address"));
      uint32_t data = static_cast<uint32_t>(
          parse_hex(d_tok, 0xFFFFFFFFull, name, lineno, "data"));
      t.accesses.push_back({AccessKind::Write, addr, data});
    } else {
      parse_fail(name, lineno, "unknown access kind '" + kind + "'");
    }
  }
  if (t.accesses.empty())
    throw std::runtime_error("trace parse error: " + name + ": empty trace");
  return t;
}

Trace parse_trace(const std::string& path, int address_bits) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return parse_trace_stream(in, path, address_bits);
}

void write_trace_stream(const Trace& t, std::ostream& out) {
  out << "# trace: " << t.name << "\n";
  for (const auto& a : t.accesses) {
    if (a.kind == AccessKind::Read) {
      out << "R 0x" << std::hex << a.address << std::dec << "\n";
    } else {
      out << "W 0x" << std::hex << a.address << " 0x" << std::setw(8)
          << std::setfill('0') << a.data << std::dec << std::setfill(' ')
          << "\n";
    }
  }
}

void write_trace(const Trace& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_trace_stream(t, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void SyntheticProfile::validate() const {
  auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in01(read_fraction))
    throw std::invalid_argument("profile: read_fraction must be in [0,1]");
  if (!(read_locality >= 0.0 && read_locality < 1.0) ||
      !(write_locality >= 0.0 && write_locality < 1.0))
    throw std::invalid_argument("profile: localities must be in [0,1)");
  if (mean_read_burst < 1.0 || mean_write_burst < 1.0)
    throw std::invalid_argument("profile: burst means must be >= 1");
  if (mean_read_rep < 1.0 || mean_write_rep < 1.0)
    throw std::invalid_argument("profile: repetition means must be >= 1");
  if (!in01(bit_change_spread))
    throw std::invalid_argument("profile: bit_change_spread must be in [0,1]");
  if (address_space_size < 1)
    throw std::invalid_argument("profile: address_space_size must be >= 1");
  if (length < 1) throw std::invalid_argument("profile: length must be >= 1");
}

namespace {

// Bounded pool of recently seen addresses.
class AddressPool {
 public:
  explicit AddressPool(size_t cap) : cap_(cap) { ring_.reserve(cap); }
  bool empty() const { return ring_.empty(); }
  void push(uint32_t a) {
    if (ring_.size() < cap_) {
      ring_.push_back(a);
    } else {
      ring_[next_] = a;
      next_ = (next_ + 1) % cap_;
    }
  }
  uint32_t pick(Rng& rng) const { return ring_[rng.below(ring_.size())]; }
  uint32_t most_recent() const {
    return ring_.size() < cap_ ? ring_.back()
                               : ring_[(next_ + cap_ - 1) % cap_];
  }

 private:
  std::vector<uint32_t> ring_;
  size_t cap_;
  size_t next_ = 0;
};

// Geometric run length on {1,2,...} with the given mean.
size_t geometric_len(Rng& rng, double mean) {
  if (mean <= 1.0) return 1;
  double p = 1.0 / mean;
  double u = rng.uniform01_pos();
  double len = 1.0 + std::floor(std::log(u) / std::log1p(-p));
  if (!(len >= 1.0)) return 1;
  if (len > 1e9) return static_cast<size_t>(1e9);
  return static_cast<size_t>(len);
}

// Bit position biased toward the LSB as spread drops toward 0.
int spread_bit(Rng& rng, double spread, int word_bits) {
  double e = 1.0 / std::max(spread, 0.05);
  int bit = static_cast<int>(word_bits * std::pow(rng.uniform01(), e));
  return std::min(bit, word_bits - 1);
}

}  // namespace

Trace generate_synthetic(const SyntheticProfile& prof, std::string name) {
  prof.validate();
  Rng rng(prof.seed);

  const size_t n = prof.length;
  size_t left_r = static_cast<size_t>(std::llround(prof.read_fraction * n));
  size_t left_w = n - left_r;

  // Repetition targets imply a locality floor of 1 - 1/rep.
  const double loc_r =
      std::max(prof.read_locality, 1.0 - 1.0 / prof.mean_read_rep);
  const double loc_w =
      std::max(prof.write_locality, 1.0 - 1.0 / prof.mean_write_rep);

  AddressPool read_pool(64), write_pool(64);
  uint64_t fresh_next = 0;
  auto fresh_addr = [&] {
    uint32_t a = static_cast<uint32_t>(fresh_next % prof.address_space_size);
    ++fresh_next;
    return a;
  };
  std::unordered_map<uint32_t, uint32_t> last_data;

  Trace t;
  t.name = std::move(name);
  t.accesses.reserve(n);

  bool read_run =
      left_r > 0 && (left_w == 0 || rng.uniform01() < static_cast<double>(left_r) / n);
  size_t run_left = 0;

  while (left_r + left_w > 0) {
    if (left_r == 0) read_run = false;
    if (left_w == 0) read_run = true;
    if (run_left == 0) {
      double mean = read_run ? prof.mean_read_burst : prof.mean_write_burst;
      run_left = std::min(geometric_len(rng, mean), read_run ? left_r : left_w);
    }

    if (read_run) {
      uint32_t a;
      if (!read_pool.empty() && rng.uniform01() < loc_r) {
        a = read_pool.pick(rng);
      } else if (!write_pool.empty() && rng.uniform01() < 0.15) {
        a = write_pool.most_recent();  // occasional read-after-write
      } else {
        a = fresh_addr();
      }
      read_pool.push(a);
      t.accesses.push_back({AccessKind::Read, a, 0});
      --left_r;
    } else {
      uint32_t a;
      if (!write_pool.empty() && rng.uniform01() < loc_w) {
        a = write_pool.pick(rng);
      } else {
        a = fresh_addr();
      }
      write_pool.push(a);
      uint32_t old = 0;
      if (auto it = last_data.find(a); it != last_data.end()) old = it->second;
      int flips = 1 + static_cast<int>(rng.below(3));
      uint32_t mask = 0;
      for (int k = 0; k < flips; ++k)
        mask |= 1u << spread_bit(rng, prof.bit_change_spread, 32);
      uint32_t data = old ^ mask;
      last_data[a] = data;
      t.accesses.push_back({AccessKind::Write, a, data});
      --left_w;
    }

    if (--run_left == 0) read_run = !read_run;
  }
  return t;
}

Trace staged_trace(const std::vector<SyntheticProfile>& stages,
                   std::string name) {
  if (stages.empty())
    throw std::invalid_argument("staged_trace: need at least one stage");
  Trace out;
  out.name = std::move(name);
  for (size_t i = 0; i < stages.size(); ++i) {
    Trace s = generate_synthetic(stages[i], out.name + "/stage" + std::to_string(i + 1));
    out.accesses.insert(out.accesses.end(), s.accesses.begin(), s.accesses.end());
    out.stage_ends.push_back(out.accesses.size());
  }
  return out;
}

}  // namespace avac
