#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace ruelle {

// Flat key=value configuration. Blank lines and lines starting with '#' are
// skipped; whitespace around keys and values is trimmed.
class FlatConfig {
 public:
  static FlatConfig parse(std::istream& is, const std::string& origin = "<config>");
  static FlatConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  // Throws ConfigError naming every key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

// Shortest round-trip decimal for a double, '.' separator regardless of locale.
std::string format_double(double v);

// CSV with a header row and '\n' line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ostream& os_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace ruelle
