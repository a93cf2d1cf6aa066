#include "holediff/records.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "holediff/error.hpp"

namespace holediff {

namespace {

const char* const kConfigKeys[] = {"map_kind", "placement", "a1", "a2", "a3", "a4"};

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json json_value(const Cell& cell) {
  switch (cell.type) {
    case Cell::Type::Text:
    case Cell::Type::Exact:
      return cell.text;
    case Cell::Type::Integer:
      return std::stoll(cell.text);
    case Cell::Type::Real: {
      const double v = std::stod(cell.text);
      if (!std::isfinite(v)) return nullptr;
      return v;
    }
    case Cell::Type::Boolean:
      return cell.text == "true";
    case Cell::Type::Empty:
      break;
  }
  return nullptr;
}

Rational parse_endpoint(const std::map<std::string, std::string>& record, const char* key) {
  try {
    return Rational::parse(record.at(key));
  } catch (const std::out_of_range&) {
    throw ConfigError(std::string("config record lacks '") + key + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config record field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string_view to_string(ScanKind kind) {
  switch (kind) {
    case ScanKind::PositionScan:
      return "scan-positions";
    case ScanKind::SizeScan:
      return "scan-size";
    case ScanKind::Phi:
      return "phi";
    case ScanKind::Escape:
      return "escape";
    case ScanKind::Simulation:
      return "simulate";
    case ScanKind::PoExpansion:
      return "po-expansion";
    case ScanKind::Diffusion:
      return "diffusion";
  }
  return "?";
}

ScanTable::ScanTable(ScanKind kind, std::vector<std::string> columns)
    : kind_(kind), columns_(std::move(columns)) {}

void ScanTable::add(std::vector<Cell> values) {
  if (values.size() != columns_.size()) {
    throw std::invalid_argument("row has " + std::to_string(values.size()) + " fields, header has " +
                                std::to_string(columns_.size()));
  }
  rows_.push_back({std::move(values)});
}

void write_csv(const ScanTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns().size(); ++i) {
    out << (i ? "," : "") << csv_field(table.columns()[i]);
  }
  out << '\n';
  for (const ScanRecord& row : table.rows()) {
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      out << (i ? "," : "") << csv_field(row.values[i].text);
    }
    out << '\n';
  }
}

void write_json_lines(const ScanTable& table, std::ostream& out) {
  for (const ScanRecord& row : table.rows()) {
    nlohmann::ordered_json obj;
    obj["record"] = std::string(to_string(table.kind()));
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      obj[table.columns()[i]] = json_value(row.values[i]);
    }
    out << obj.dump() << '\n';
  }
}

std::map<std::string, std::string> config_record(const ModelConfig& config) {
  return {{"map_kind", std::string(to_string(config.kind()))},
          {"placement", std::string(to_string(config.placement()))},
          {"a1", config.a1().str()},
          {"a2", config.a2().str()},
          {"a3", config.a3().str()},
          {"a4", config.a4().str()}};
}

ModelConfig config_from_record(const std::map<std::string, std::string>& record) {
  for (const char* key : kConfigKeys) {
    if (!record.count(key)) throw ConfigError(std::string("config record lacks '") + key + "'");
  }
  return ModelConfig(parse_map_kind(record.at("map_kind")), parse_placement(record.at("placement")),
                     parse_endpoint(record, "a1"), parse_endpoint(record, "a2"),
                     parse_endpoint(record, "a3"), parse_endpoint(record, "a4"));
}

std::string config_to_json(const ModelConfig& config) {
  nlohmann::ordered_json obj;
  const auto record = config_record(config);
  for (const char* key : kConfigKeys) obj[key] = record.at(key);
  return obj.dump();
}

ModelConfig config_from_json(std::string_view text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ConfigError("config JSON must be an object");
  std::map<std::string, std::string> record;
  for (const char* key : kConfigKeys) {
    if (!obj.contains(key)) continue;
    if (!obj[key].is_string()) throw ConfigError(std::string("config JSON field '") + key + "' must be a string");
    record[key] = obj[key].get<std::string>();
  }
  return config_from_record(record);
}

std::string config_to_csv(const ModelConfig& config) {
  const auto record = config_record(config);
  std::ostringstream out;
  for (std::size_t i = 0; i < 6; ++i) out << (i ? "," : "") << kConfigKeys[i];
  out << '\n';
  for (std::size_t i = 0; i < 6; ++i) out << (i ? "," : "") << csv_field(record.at(kConfigKeys[i]));
  out << '\n';
  return out.str();
}

ModelConfig config_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header, values;
  if (!std::getline(in, header) || !std::getline(in, values)) {
    throw ConfigError("config CSV needs a header and a value line");
  }
  const auto keys = split_csv_line(header);
  const auto fields = split_csv_line(values);
  if (keys.size() != fields.size()) throw ConfigError("config CSV: header and values differ in width");
  std::map<std::string, std::string> record;
  for (std::size_t i = 0; i < keys.size(); ++i) record[keys[i]] = fields[i];
  return config_from_record(record);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

}  // namespace holediff
