#pragma once

#include <map>
#include <string>
#include <vector>

namespace avac {

// Flat key-value configuration text: one `key = value` per line, `#` starts a
// comment. Later assignments override earlier ones.
class ConfigFile {
 public:
  static ConfigFile load(const std::string& path);
  static ConfigFile parse(const std::string& text, const std::string& name);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long get_long(const std::string& key, long def) const;
  unsigned long long get_u64(const std::string& key,
                             unsigned long long def) const;
  bool get_bool(const std::string& key, bool def) const;
  // Comma-separated list value.
  std::vector<std::string> get_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace avac
