#include "wgchain/io.hpp"

#include "wgchain/errors.hpp"
#include "wgchain/model.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <regex>
#include <sstream>

namespace wgchain {

namespace {

bool has_newline(std::string_view s) { return s.find_first_of("\r\n") != std::string_view::npos; }

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

void Table::set(std::string key, std::string value) {
  if (key.empty() || key.find(':') != std::string::npos || has_newline(key)) {
    throw ConfigError("bad header key '" + key + "'");
  }
  if (key == "columns" || key == "units") throw ConfigError("reserved header key " + key);
  if (has_newline(value)) throw ConfigError("header value for " + key + " spans lines");
  for (auto& [k, v] : header) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  header.emplace_back(std::move(key), std::move(value));
}

void Table::add_column(std::string name, std::string unit) {
  columns.push_back(std::move(name));
  units.push_back(std::move(unit));
}

std::optional<std::string> Table::get(std::string_view key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<double> Table::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("no column named " + std::string(name));
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(c));
  return out;
}

void Table::validate() const {
  if (columns.empty()) throw ConfigError("table has no columns");
  if (units.size() != columns.size()) throw ConfigError("units and columns differ in length");
  for (const auto& c : columns) {
    if (c.empty() || c.find_first_of("\t\r\n") != std::string::npos) {
      throw ConfigError("bad column name '" + c + "'");
    }
  }
  for (const auto& u : units) {
    if (u.empty() || u.find_first_of("\t\r\n") != std::string::npos) {
      throw ConfigError("bad unit '" + u + "'");
    }
  }
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw ConfigError("row width does not match columns");
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return std::signbit(x) ? "-0" : "0";
  // Shortest form that reads back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  const std::string buf(s);
  if (buf.empty()) throw ConfigError("empty number");
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) throw ConfigError("not a number: '" + buf + "'");
  return x;
}

void write_text(std::ostream& os, const Table& table) {
  table.validate();
  for (const auto& [k, v] : table.header) os << "# " << k << ": " << v << '\n';
  os << "# columns: " << join(table.columns, '\t') << '\n';
  os << "# units: " << join(table.units, '\t') << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << '\t';
      os << format_double(row[i]);
    }
    os << '\n';
  }
}

Table read_text(std::istream& is) {
  Table table;
  std::string line;
  int lineno = 0;
  bool have_columns = false;
  bool have_units = false;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    if (line.starts_with("# ")) {
      if (have_units) throw ConfigError(where + ": header after units line");
      const auto colon = line.find(": ", 2);
      if (colon == std::string::npos) throw ConfigError(where + ": malformed header");
      std::string key = line.substr(2, colon - 2);
      std::string value = line.substr(colon + 2);
      if (key == "columns") {
        table.columns = split(value, '\t');
        have_columns = true;
      } else if (key == "units") {
        if (!have_columns) throw ConfigError(where + ": units before columns");
        table.units = split(value, '\t');
        have_units = true;
      } else {
        if (have_columns) throw ConfigError(where + ": header after columns line");
        table.set(std::move(key), std::move(value));
      }
      continue;
    }
    if (!have_units) throw ConfigError(where + ": data before column header");
    std::vector<double> row;
    for (const auto& field : split(line, '\t')) row.push_back(parse_double(field));
    if (row.size() != table.columns.size()) throw ConfigError(where + ": wrong number of fields");
    table.rows.push_back(std::move(row));
  }
  if (!have_units) throw ConfigError("missing columns/units header");
  table.validate();
  return table;
}

std::string to_text(const Table& table) {
  std::ostringstream os;
  write_text(os, table);
  return os.str();
}

Table from_text(const std::string& text) {
  std::istringstream is(text);
  return read_text(is);
}

namespace {

nlohmann::ordered_json number_to_json(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double number_from_json(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_double(j.get<std::string>());
  throw ConfigError("expected a number in table rows");
}

}  // namespace

nlohmann::ordered_json to_json(const Table& table) {
  table.validate();
  nlohmann::ordered_json j;
  j["header"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.header) j["header"][k] = v;
  j["columns"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    j["columns"].push_back({{"name", table.columns[i]}, {"unit", table.units[i]}});
  }
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (double x : row) r.push_back(number_to_json(x));
    j["rows"].push_back(std::move(r));
  }
  return j;
}

Table from_json(const nlohmann::ordered_json& j) {
  Table table;
  try {
    for (const auto& [k, v] : j.at("header").items()) table.set(k, v.get<std::string>());
    for (const auto& c : j.at("columns")) {
      table.add_column(c.at("name").get<std::string>(), c.at("unit").get<std::string>());
    }
    for (const auto& r : j.at("rows")) {
      std::vector<double> row;
      for (const auto& x : r) row.push_back(number_from_json(x));
      table.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed structured table: ") + e.what());
  }
  table.validate();
  return table;
}

OutputFormat parse_format(std::string_view s) {
  if (s == "text") return OutputFormat::Text;
  if (s == "structured") return OutputFormat::Structured;
  throw ConfigError("format must be text or structured, got '" + std::string(s) + "'");
}

std::string render(const Table& table, OutputFormat format) {
  if (format == OutputFormat::Text) return to_text(table);
  // nlohmann writes the shortest form that parses back to the same double.
  return to_json(table).dump(1) + "\n";
}

double parse_theta(std::string_view s) {
  static const std::regex re(
      R"(^\s*([+-])?\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*(\*?\s*pi)?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?\s*$)");
  const std::string str(s);
  std::smatch m;
  if (!std::regex_match(str, m, re) || (!m[2].matched && !m[3].matched)) {
    throw ConfigError("cannot parse theta '" + str + "'");
  }
  if (!m[2].matched && m[3].str().starts_with("*")) {
    throw ConfigError("cannot parse theta '" + str + "'");
  }
  double value = m[2].matched ? std::strtod(m[2].str().c_str(), nullptr) : 1.0;
  if (m[3].matched) value *= kPi;
  if (m[4].matched) {
    const double den = std::strtod(m[4].str().c_str(), nullptr);
    if (den == 0.0) throw ConfigError("theta '" + str + "' divides by zero");
    value /= den;
  }
  if (m[1].matched && m[1].str() == "-") value = -value;
  if (!std::isfinite(value)) throw ConfigError("theta '" + str + "' is not finite");
  return value;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

}  // namespace wgchain
