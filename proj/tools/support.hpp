#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ruelle/report_io.hpp"

namespace ruelle::cli {

using json = nlohmann::ordered_json;

// One config key of a subcommand. The CLI flag is "--" + key with '_' -> '-'.
struct KeySpec {
  std::string key;
  std::string fallback;
  std::string help;
};

// Row-major table written as CSV or as a JSON array of row objects.
class Table {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add(std::vector<Cell> row);
  std::string csv() const;
  json to_json() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct Context {
  std::string command;
  FlatConfig cfg;  // resolved: defaults, then --config file, then flags
  std::filesystem::path out_dir;
  std::string format;  // table encoding: csv or json
  std::uint64_t seed = 1;

  double num(const std::string& key) const { return cfg.get_double(key, 0.0); }
  long long integer(const std::string& key) const { return cfg.get_int(key, 0); }
  std::string str(const std::string& key) const { return cfg.get_string(key, ""); }
  std::vector<double> list(const std::string& key) const;

  void write_file(const std::string& name, const std::string& content) const;
  // Writes <stem>.csv or <stem>.json according to `format`.
  void write_table(const std::string& stem, const Table& t) const;
  void write_json(const std::string& name, const json& j) const;
};

// Comma separated numbers, or start:stop:step (inclusive of stop up to 1e-9).
std::vector<double> parse_list(const std::string& key, const std::string& s);

json to_json_number(double v);

}  // namespace ruelle::cli
