#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "matbridge/errors.hpp"
#include "matbridge/linalg.hpp"
#include "matbridge/schema.hpp"
#include "matbridge/text.hpp"

namespace matbridge {

// Labeled records in schema column order: inputs p x 16, outputs p x 5 under
// the default schema.
struct Dataset {
  Schema schema;
  Matrix inputs;
  Matrix outputs;

  std::size_t size() const noexcept { return inputs.rows(); }

  Dataset rows(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.schema = schema;
    out.inputs = Matrix(indices.size(), schema.input_width());
    out.outputs = Matrix(indices.size(), schema.output_width());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      for (std::size_t c = 0; c < schema.input_width(); ++c) {
        out.inputs(r, c) = inputs(indices[r], c);
      }
      for (std::size_t c = 0; c < schema.output_width(); ++c) {
        out.outputs(r, c) = outputs(indices[r], c);
      }
    }
    return out;
  }
};

struct LoadResult {
  Dataset dataset;
  std::vector<std::string> warnings;  // out-of-range compositions, one per cell
};

namespace detail {

inline std::vector<std::size_t> map_columns(const std::vector<std::string>& header,
                                            const std::vector<ColumnSpec>& columns,
                                            const std::string& path) {
  std::vector<std::size_t> mapping;
  mapping.reserve(columns.size());
  for (const ColumnSpec& col : columns) {
    bool found = false;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == col.name) {
        mapping.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) {
      throw SchemaError(path + ": missing column '" + col.name + "'");
    }
  }
  return mapping;
}

struct CsvBody {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvBody read_csv_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  CsvBody body;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!have_header) {
      body.header = split_fields(text, ',');
      have_header = true;
    } else {
      body.rows.push_back(split_fields(text, ','));
    }
  }
  if (!have_header) throw ParseError(path + ": missing header row");
  return body;
}

inline double parse_cell(const std::vector<std::string>& row, std::size_t file_col,
                         const std::string& name, std::size_t data_row) {
  const std::string where = "row " + std::to_string(data_row) + ", column '" + name + "'";
  if (file_col >= row.size()) throw ParseError(where + ": missing value");
  return parse_double(row[file_col], where);
}

}  // namespace detail

// Columns are matched against the schema by header name, order-insensitive;
// extra file columns are ignored. Out-of-range compositions parse fine but
// come back as warnings.
inline LoadResult load_csv(const std::string& path, const Schema& schema) {
  detail::CsvBody body = detail::read_csv_body(path);
  const auto in_map = detail::map_columns(body.header, schema.inputs, path);
  const auto out_map = detail::map_columns(body.header, schema.outputs, path);

  LoadResult result;
  result.dataset.schema = schema;
  result.dataset.inputs = Matrix(body.rows.size(), schema.input_width());
  result.dataset.outputs = Matrix(body.rows.size(), schema.output_width());

  for (std::size_t r = 0; r < body.rows.size(); ++r) {
    for (std::size_t c = 0; c < schema.input_width(); ++c) {
      const ColumnSpec& col = schema.inputs[c];
      const double v = detail::parse_cell(body.rows[r], in_map[c], col.name, r + 1);
      result.dataset.inputs(r, c) = v;
      if (col.bounded() && std::isfinite(v) && (v < col.min || v > col.max)) {
        result.warnings.push_back("row " + std::to_string(r + 1) + ": " + col.name + "=" +
                                  fmt_double(v) + " outside [" + fmt_double(col.min) + ", " +
                                  fmt_double(col.max) + "]");
      }
    }
    for (std::size_t c = 0; c < schema.output_width(); ++c) {
      result.dataset.outputs(r, c) =
          detail::parse_cell(body.rows[r], out_map[c], schema.outputs[c].name, r + 1);
    }
  }
  return result;
}

// Input-only loader for prediction files (no output columns required).
inline Matrix load_inputs_csv(const std::string& path, const Schema& schema) {
  detail::CsvBody body = detail::read_csv_body(path);
  const auto in_map = detail::map_columns(body.header, schema.inputs, path);
  Matrix inputs(body.rows.size(), schema.input_width());
  for (std::size_t r = 0; r < body.rows.size(); ++r) {
    for (std::size_t c = 0; c < schema.input_width(); ++c) {
      inputs(r, c) = detail::parse_cell(body.rows[r], in_map[c], schema.inputs[c].name, r + 1);
    }
  }
  return inputs;
}

inline std::string format_csv(const Dataset& ds) {
  std::ostringstream out;
  for (std::size_t c = 0; c < ds.schema.input_width(); ++c) {
    if (c) out << ",";
    out << ds.schema.inputs[c].name;
  }
  for (const ColumnSpec& col : ds.schema.outputs) out << "," << col.name;
  out << "\n";
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < ds.schema.input_width(); ++c) {
      if (c) out << ",";
      out << fmt_double(ds.inputs(r, c));
    }
    for (std::size_t c = 0; c < ds.schema.output_width(); ++c) {
      out << "," << fmt_double(ds.outputs(r, c));
    }
    out << "\n";
  }
  return out.str();
}

inline void write_csv(const Dataset& ds, const std::string& path) {
  write_text_file(path, format_csv(ds));
}

struct FilterResult {
  Dataset dataset;
  std::vector<std::size_t> rejected;  // original row indices, ascending
};

// Removes rows with non-finite entries, validity-range violations (the
// composition limits under the default schema), nonpositive strength or life
// values, and the YS > TS contradiction. Survivors keep their original order.
inline FilterResult filter_outliers(const Dataset& ds) {
  if (ds.size() == 0) throw ConfigError("filter_outliers: empty dataset");

  const auto ts = ds.schema.find_input("TS");
  const auto ys = ds.schema.find_input("YS");
  const auto life = ds.schema.find_output("life");
  const auto years = ds.schema.find_output("service_years");

  std::vector<std::size_t> keep;
  FilterResult result;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    bool bad = false;
    for (std::size_t c = 0; c < ds.schema.input_width() && !bad; ++c) {
      const double v = ds.inputs(r, c);
      const ColumnSpec& col = ds.schema.inputs[c];
      if (!std::isfinite(v) || v < col.min || v > col.max) bad = true;
    }
    for (std::size_t c = 0; c < ds.schema.output_width() && !bad; ++c) {
      const double v = ds.outputs(r, c);
      const ColumnSpec& col = ds.schema.outputs[c];
      if (!std::isfinite(v) || v < col.min || v > col.max) bad = true;
    }
    if (!bad && ts && ds.inputs(r, *ts) <= 0.0) bad = true;
    if (!bad && ys && ds.inputs(r, *ys) <= 0.0) bad = true;
    if (!bad && life && ds.outputs(r, *life) <= 0.0) bad = true;
    if (!bad && years && ds.outputs(r, *years) <= 0.0) bad = true;
    if (!bad && ts && ys && ds.inputs(r, *ys) > ds.inputs(r, *ts)) bad = true;

    if (bad) {
      result.rejected.push_back(r);
    } else {
      keep.push_back(r);
    }
  }
  if (keep.empty()) {
    throw ValidationError("filter_outliers: every row was rejected");
  }
  result.dataset = ds.rows(keep);
  return result;
}

}  // namespace matbridge
