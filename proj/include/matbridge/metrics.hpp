#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "matbridge/dataset.hpp"
#include "matbridge/errors.hpp"
#include "matbridge/model_io.hpp"

namespace matbridge {

// Evaluation statistics over targets t_j and outputs o_j across p patterns:
//   RMS  = ((1/p) * sum |t_j - o_j|^2)^(1/2)
//   R^2  = 1 - sum (t_j - o_j)^2 / sum (o_j)^2
//   mean % error = (1/p) * sum ((t_j - o_j)/t_j * 100)
// R^2 is implemented verbatim with the sum of squared outputs in the
// denominator, not the variance; r2_standard provides the usual coefficient
// of determination as a separate sanity output.

namespace detail {

inline void check_pair(std::span<const double> t, std::span<const double> o,
                       const char* what) {
  if (t.size() != o.size()) {
    throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(t.size()) +
                     " vs " + std::to_string(o.size()) + ")");
  }
  if (t.empty()) throw ShapeError(std::string(what) + ": empty vectors");
}

}  // namespace detail

inline double rms(std::span<const double> t, std::span<const double> o) {
  detail::check_pair(t, o, "rms");
  double sq = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double d = t[j] - o[j];
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(t.size()));
}

inline double r2(std::span<const double> t, std::span<const double> o) {
  detail::check_pair(t, o, "r2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double d = t[j] - o[j];
    num += d * d;
    den += o[j] * o[j];
  }
  if (den == 0.0) {
    throw UndefinedMetricError("r2: all outputs zero, denominator vanishes");
  }
  return 1.0 - num / den;
}

// Conventional R^2 against the target mean; not part of the report proper.
inline double r2_standard(std::span<const double> t, std::span<const double> o) {
  detail::check_pair(t, o, "r2_standard");
  double mean = 0.0;
  for (double v : t) mean += v;
  mean /= static_cast<double>(t.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    ss_res += (t[j] - o[j]) * (t[j] - o[j]);
    ss_tot += (t[j] - mean) * (t[j] - mean);
  }
  if (ss_tot == 0.0) {
    throw UndefinedMetricError("r2_standard: targets constant, variance vanishes");
  }
  return 1.0 - ss_res / ss_tot;
}

// Signed, as printed: positive and negative errors cancel.
inline double mean_pct_error(std::span<const double> t, std::span<const double> o) {
  detail::check_pair(t, o, "mean_pct_error");
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0.0) {
      throw UndefinedMetricError("mean_pct_error: target zero at index " + std::to_string(j));
    }
    acc += (t[j] - o[j]) / t[j] * 100.0;
  }
  return acc / static_cast<double>(t.size());
}

inline double mean_abs_pct_error(std::span<const double> t, std::span<const double> o) {
  detail::check_pair(t, o, "mean_abs_pct_error");
  double acc = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0.0) {
      throw UndefinedMetricError("mean_abs_pct_error: target zero at index " +
                                 std::to_string(j));
    }
    acc += std::abs((t[j] - o[j]) / t[j]) * 100.0;
  }
  return acc / static_cast<double>(t.size());
}

struct ColumnMetrics {
  std::string column;
  double rms = 0.0;
  std::optional<double> r2;
  std::optional<double> mean_pct_error;
  std::optional<double> r2_standard;
  std::optional<double> mean_abs_pct_error;
  std::string issue;  // set when a metric is undefined for this column
};

struct EvalReport {
  std::size_t record_count = 0;
  std::vector<ColumnMetrics> columns;
  ColumnMetrics aggregate;  // over the concatenation of all output columns
  Matrix predictions;       // denormalized, one row per record
};

namespace detail {

inline ColumnMetrics column_metrics(std::string name, std::span<const double> t,
                                    std::span<const double> o) {
  ColumnMetrics m;
  m.column = std::move(name);
  m.rms = rms(t, o);
  auto guard = [&m](auto fn, auto& slot) {
    try {
      slot = fn();
    } catch (const UndefinedMetricError& e) {
      slot = std::nullopt;
      if (!m.issue.empty()) m.issue += "; ";
      m.issue += e.what();
    }
  };
  guard([&] { return r2(t, o); }, m.r2);
  guard([&] { return mean_pct_error(t, o); }, m.mean_pct_error);
  guard([&] { return r2_standard(t, o); }, m.r2_standard);
  guard([&] { return mean_abs_pct_error(t, o); }, m.mean_abs_pct_error);
  return m;
}

}  // namespace detail

// Normalizes with the bundle's input parameters, runs the network, then
// denormalizes so every metric is computed in physical units.
inline EvalReport evaluate(const ModelBundle& bundle, const Dataset& ds) {
  bundle.validate();
  if (!bundle.schema.compatible_with(ds.schema)) {
    throw CompatibilityError("evaluate: dataset schema does not match the model's schema");
  }
  if (ds.size() == 0) throw ConfigError("evaluate: empty dataset");

  EvalReport report;
  report.record_count = ds.size();
  const Matrix normed = normalize_apply(ds.inputs, bundle.norm_in);
  const ForwardTrace trace = forward_trace(bundle.network, normed);
  report.predictions = denormalize(trace.output(), bundle.norm_out);

  const std::size_t p = ds.size();
  const std::size_t n_out = ds.schema.output_width();
  std::vector<double> t_col(p), o_col(p);
  std::vector<double> t_all, o_all;
  t_all.reserve(p * n_out);
  o_all.reserve(p * n_out);

  for (std::size_t c = 0; c < n_out; ++c) {
    for (std::size_t r = 0; r < p; ++r) {
      t_col[r] = ds.outputs(r, c);
      o_col[r] = report.predictions(r, c);
      t_all.push_back(t_col[r]);
      o_all.push_back(o_col[r]);
    }
    report.columns.push_back(
        detail::column_metrics(ds.schema.outputs[c].name, t_col, o_col));
  }
  report.aggregate = detail::column_metrics("all", t_all, o_all);
  return report;
}

inline std::string format_report_csv(const EvalReport& report,
                                     const std::string& provenance = {}) {
  std::ostringstream out;
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "# records=" << report.record_count << "\n";
  out << "column,rms,r2,mean_pct_error,r2_standard,mean_abs_pct_error,issue\n";
  auto cell = [](const std::optional<double>& v) { return v ? fmt_double(*v) : ""; };
  auto line = [&](const ColumnMetrics& m) {
    out << m.column << "," << fmt_double(m.rms) << "," << cell(m.r2) << ","
        << cell(m.mean_pct_error) << "," << cell(m.r2_standard) << ","
        << cell(m.mean_abs_pct_error) << "," << m.issue << "\n";
  };
  for (const ColumnMetrics& m : report.columns) line(m);
  line(report.aggregate);
  return out.str();
}

inline std::string format_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "records: " << report.record_count << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-14s %13s %12s %12s %12s\n", "column", "rms", "r2",
                "mean%err", "mean|%err|");
  out << buf;
  auto line = [&](const ColumnMetrics& m) {
    auto opt = [](const std::optional<double>& v) {
      if (!v) return std::string("n/a");
      char b[32];
      std::snprintf(b, sizeof(b), "%.6g", *v);
      return std::string(b);
    };
    std::snprintf(buf, sizeof(buf), "%-14s %13.6g %12s %12s %12s\n", m.column.c_str(), m.rms,
                  opt(m.r2).c_str(), opt(m.mean_pct_error).c_str(),
                  opt(m.mean_abs_pct_error).c_str());
    out << buf;
    if (!m.issue.empty()) out << "  note: " << m.issue << "\n";
  };
  for (const ColumnMetrics& m : report.columns) line(m);
  line(report.aggregate);
  return out.str();
}

// Prediction dump: record id, each output column's target, then prediction.
inline std::string format_predictions_csv(const Dataset& ds, const Matrix& predictions,
                                          const std::string& provenance = {}) {
  if (predictions.rows() != ds.size() || predictions.cols() != ds.schema.output_width()) {
    throw ShapeError("format_predictions_csv: prediction shape mismatch");
  }
  std::ostringstream out;
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "record";
  for (const ColumnSpec& c : ds.schema.outputs) out << ",target_" << c.name;
  for (const ColumnSpec& c : ds.schema.outputs) out << ",predicted_" << c.name;
  out << "\n";
  for (std::size_t r = 0; r < ds.size(); ++r) {
    out << r;
    for (std::size_t c = 0; c < ds.schema.output_width(); ++c) {
      out << "," << fmt_double(ds.outputs(r, c));
    }
    for (std::size_t c = 0; c < ds.schema.output_width(); ++c) {
      out << "," << fmt_double(predictions(r, c));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace matbridge
