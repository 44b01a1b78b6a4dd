#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "matbridge/errors.hpp"
#include "matbridge/text.hpp"

namespace matbridge {

// Column description: name, physical unit, and validity range used by the
// outlier filter (infinite bounds never reject).
struct ColumnSpec {
  std::string name;
  std::string unit;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();

  bool bounded() const noexcept {
    return min > -std::numeric_limits<double>::infinity() ||
           max < std::numeric_limits<double>::infinity();
  }

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

// Input/output column vocabulary of a dataset. The default is the 16-input,
// 5-output layout: 11 alloying elements, 4 mechanical properties, wall
// thickness, mapping to stress/strain/deformation/life/service years.
struct Schema {
  std::vector<ColumnSpec> inputs;
  std::vector<ColumnSpec> outputs;

  std::size_t input_width() const noexcept { return inputs.size(); }
  std::size_t output_width() const noexcept { return outputs.size(); }

  std::optional<std::size_t> find_input(std::string_view name) const {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (inputs[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::optional<std::size_t> find_output(std::string_view name) const {
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (outputs[i].name == name) return i;
    }
    return std::nullopt;
  }

  // Model/dataset compatibility is decided on column names, in order.
  bool compatible_with(const Schema& other) const {
    if (inputs.size() != other.inputs.size() || outputs.size() != other.outputs.size()) {
      return false;
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (inputs[i].name != other.inputs[i].name) return false;
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (outputs[i].name != other.outputs[i].name) return false;
    }
    return true;
  }

  friend bool operator==(const Schema&, const Schema&) = default;
};

// ASTM A487 Gr 4C composition limits; mechanical and output columns carry
// unconstrained ranges (the filter's named rules handle those).
inline Schema default_schema() {
  const double inf = std::numeric_limits<double>::infinity();
  Schema s;
  s.inputs = {
      {"C", "%", 0.2, 0.3},    {"Si", "%", 0.4, 0.8},  {"Mn", "%", 0.8, 1.0},
      {"S", "%", 0.0, 0.03},   {"P", "%", 0.0, 0.03},  {"Cr", "%", 0.4, 0.8},
      {"Ni", "%", 0.4, 0.8},   {"Mo", "%", 0.15, 0.3}, {"Cu", "%", 0.0, 0.5},
      {"V", "%", 0.0, 0.03},   {"W", "%", 0.0, 0.1},   {"TS", "MPa", -inf, inf},
      {"YS", "MPa", -inf, inf}, {"EI", "%", -inf, inf}, {"RA", "%", -inf, inf},
      {"thickness", "mm", -inf, inf},
  };
  s.outputs = {
      {"stress", "Pa", -inf, inf},      {"strain", "m/m", -inf, inf},
      {"deformation", "m", -inf, inf},  {"life", "cycles", -inf, inf},
      {"service_years", "years", -inf, inf},
  };
  return s;
}

inline constexpr std::string_view kSchemaFormatMarker = "matbridge-schema/1";

// Schema override file: marker line, then one line per column:
//   input <name> <unit> <min> <max>
//   output <name> <unit> <min> <max>
inline std::string format_schema(const Schema& schema) {
  std::ostringstream out;
  out << kSchemaFormatMarker << "\n";
  for (const ColumnSpec& c : schema.inputs) {
    out << "input " << c.name << " " << c.unit << " " << fmt_double(c.min) << " "
        << fmt_double(c.max) << "\n";
  }
  for (const ColumnSpec& c : schema.outputs) {
    out << "output " << c.name << " " << c.unit << " " << fmt_double(c.min) << " "
        << fmt_double(c.max) << "\n";
  }
  return out.str();
}

inline void save_schema(const Schema& schema, const std::string& path) {
  write_text_file(path, format_schema(schema));
}

inline Schema parse_schema(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSchemaFormatMarker) {
    throw ParseError("schema file: missing '" + std::string(kSchemaFormatMarker) + "' marker");
  }
  Schema schema;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split_fields(body, ' ');
    fields.erase(std::remove(fields.begin(), fields.end(), std::string()), fields.end());
    if (fields.size() != 5 || (fields[0] != "input" && fields[0] != "output")) {
      throw ParseError("schema file line " + std::to_string(line_no) +
                       ": expected 'input|output <name> <unit> <min> <max>'");
    }
    ColumnSpec col;
    col.name = fields[1];
    col.unit = fields[2];
    col.min = parse_double(fields[3], "schema column " + col.name + " min");
    col.max = parse_double(fields[4], "schema column " + col.name + " max");
    if (col.min > col.max) {
      throw ParseError("schema column " + col.name + ": min exceeds max");
    }
    (fields[0] == "input" ? schema.inputs : schema.outputs).push_back(std::move(col));
  }
  if (schema.inputs.empty() || schema.outputs.empty()) {
    throw ParseError("schema file: needs at least one input and one output column");
  }
  return schema;
}

inline Schema load_schema(const std::string& path) {
  return parse_schema(read_text_file(path));
}

}  // namespace matbridge
