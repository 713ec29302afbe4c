#include "support.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ruelle/common.hpp"

namespace ruelle::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw ConfigError("Table: row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string Table::csv() const {
  std::ostringstream os;
  CsvWriter w(os, columns_);
  for (const auto& row : rows_) {
    for (const auto& c : row) std::visit([&](const auto& v) { w.cell(v); }, c);
    w.end_row();
  }
  return os.str();
}

json Table::to_json() const {
  json arr = json::array();
  for (const auto& row : rows_) {
    json o = json::object();
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              o[columns_[i]] = to_json_number(v);
            else
              o[columns_[i]] = v;
          },
          row[i]);
    arr.push_back(std::move(o));
  }
  return arr;
}

// JSON has no inf/nan; they are written as strings so that files stay valid.
json to_json_number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  auto num = [&](const std::string& t) {
    FlatConfig c;
    c.set(key, t);
    return c.get_double(key, 0.0);
  };
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("config key '" + key + "': expected start:stop:step");
    const double a = num(parts[0]), b = num(parts[1]), h = num(parts[2]);
    if (!(h > 0.0) || b < a) throw ConfigError("config key '" + key + "': empty or invalid range");
    const long n = std::lround(std::floor((b - a) / h + 1e-9));
    if (n > 100000) throw ConfigError("config key '" + key + "': range too long");
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
    return out;
  }
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(num(p));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<double> Context::list(const std::string& key) const { return parse_list(key, str(key)); }

void Context::write_file(const std::string& name, const std::string& content) const {
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << content;
}

void Context::write_table(const std::string& stem, const Table& t) const {
  if (format == "csv")
    write_file(stem + ".csv", t.csv());
  else
    write_json(stem + ".json", t.to_json());
}

void Context::write_json(const std::string& name, const json& j) const { write_file(name, j.dump(2) + "\n"); }

}  // namespace ruelle::cli
