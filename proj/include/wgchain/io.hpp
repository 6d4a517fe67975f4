#ifndef WGCHAIN_IO_HPP
#define WGCHAIN_IO_HPP

// Columnar output files.
//
// Text layout:
//   # key: value            (header, in insertion order)
//   # columns: a<TAB>b ...
//   # units: u<TAB>v ...
//   1<TAB>2 ...             (data rows)
//
// Numbers use 17 significant digits so that parsing a file and writing it
// again reproduces it byte for byte.

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wgchain {

struct Table {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> columns;
  std::vector<std::string> units;
  std::vector<std::vector<double>> rows;

  void set(std::string key, std::string value);
  void add_column(std::string name, std::string unit);
  std::optional<std::string> get(std::string_view key) const;
  std::vector<double> column(std::string_view name) const;
  /// Throws ConfigError if the table is not well formed.
  void validate() const;
};

std::string format_double(double x);
/// Accepts the output of format_double, including inf, -inf and nan.
double parse_double(std::string_view s);

void write_text(std::ostream& os, const Table& table);
Table read_text(std::istream& is);
std::string to_text(const Table& table);
Table from_text(const std::string& text);

nlohmann::ordered_json to_json(const Table& table);
Table from_json(const nlohmann::ordered_json& j);

enum class OutputFormat { Text, Structured };
OutputFormat parse_format(std::string_view s);
std::string render(const Table& table, OutputFormat format);

/// Parses a lattice phase: decimals, "pi", "pi/2", "0.95pi", "1.5*pi", "3pi/2", "-pi/4".
double parse_theta(std::string_view s);

std::string sha256_hex(std::string_view data);

}  // namespace wgchain

#endif  // WGCHAIN_IO_HPP
