#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "holediff/model.hpp"
#include "holediff/rational.hpp"

namespace holediff {

enum class ScanKind { PositionScan, SizeScan, Phi, Escape, Simulation, PoExpansion, Diffusion };

std::string_view to_string(ScanKind kind);

/// One output value with its rendering: exact rationals as "p/q", floats
/// with 17 significant digits.
struct Cell {
  enum class Type { Text, Integer, Exact, Real, Boolean, Empty };

  Type type = Type::Empty;
  std::string text;

  static Cell str(std::string value) { return {Type::Text, std::move(value)}; }
  static Cell integer(std::int64_t value) { return {Type::Integer, std::to_string(value)}; }
  static Cell exact(const Rational& value) { return {Type::Exact, value.str()}; }
  static Cell real(double value) { return {Type::Real, format_float(value)}; }
  static Cell boolean(bool value) { return {Type::Boolean, value ? "true" : "false"}; }
  static Cell empty() { return {}; }
};

/// A row of a scan table, in column order.
struct ScanRecord {
  std::vector<Cell> values;
};

/// A typed table with a fixed header, written as CSV or JSON lines.
class ScanTable {
 public:
  ScanTable(ScanKind kind, std::vector<std::string> columns);

  ScanKind kind() const { return kind_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<ScanRecord>& rows() const { return rows_; }

  /// std::invalid_argument when the row width does not match the header.
  void add(std::vector<Cell> values);

 private:
  ScanKind kind_;
  std::vector<std::string> columns_;
  std::vector<ScanRecord> rows_;
};

/// Header line plus one line per row; fields containing a comma, quote or
/// newline are quoted with doubled quotes.
void write_csv(const ScanTable& table, std::ostream& out);

/// One JSON object per row and line, keys in column order plus "record"
/// (the scan kind). Exact values are strings, floats and integers numbers,
/// non-finite floats and empty cells null.
void write_json_lines(const ScanTable& table, std::ostream& out);

/// Flat record {map_kind, placement, a1, a2, a3, a4}, endpoints as "p/q".
std::map<std::string, std::string> config_record(const ModelConfig& config);
ModelConfig config_from_record(const std::map<std::string, std::string>& record);

std::string config_to_json(const ModelConfig& config);
/// ConfigError on missing keys or malformed values.
ModelConfig config_from_json(std::string_view text);

/// Two CSV lines: header "map_kind,placement,a1,a2,a3,a4" and values.
std::string config_to_csv(const ModelConfig& config);
ModelConfig config_from_csv(std::string_view text);

/// Splits one CSV line into fields, honouring quotes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace holediff
