#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matbridge/dataset.hpp"
#include "matbridge/errors.hpp"
#include "matbridge/linalg.hpp"

namespace matbridge {

// Per-column min/max for the reversible [-1, 1] scaling. Fitted on the
// training split only and reused for test/validation.
struct NormParams {
  std::vector<std::pair<double, double>> ranges;  // (min, max) per column

  std::size_t size() const noexcept { return ranges.size(); }

  friend bool operator==(const NormParams&, const NormParams&) = default;
};

namespace detail {

inline NormParams fit_columns(const Matrix& m) {
  NormParams p;
  p.ranges.resize(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double lo = m(0, c);
    double hi = m(0, c);
    for (std::size_t r = 1; r < m.rows(); ++r) {
      lo = std::min(lo, m(r, c));
      hi = std::max(hi, m(r, c));
    }
    p.ranges[c] = {lo, hi};
  }
  return p;
}

}  // namespace detail

inline std::pair<NormParams, NormParams> normalize_fit(const Dataset& ds) {
  if (ds.size() == 0) throw ConfigError("normalize_fit: empty dataset");
  return {detail::fit_columns(ds.inputs), detail::fit_columns(ds.outputs)};
}

// x' = 2(x - min)/(max - min) - 1; a constant column (min = max) maps to 0.
inline std::vector<double> normalize_apply(std::span<const double> x, const NormParams& p) {
  if (x.size() != p.size()) {
    throw ShapeError("normalize_apply: vector width " + std::to_string(x.size()) +
                     " != parameter count " + std::to_string(p.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    const auto [lo, hi] = p.ranges[c];
    out[c] = (hi == lo) ? 0.0 : 2.0 * (x[c] - lo) / (hi - lo) - 1.0;
  }
  return out;
}

inline std::vector<double> denormalize(std::span<const double> y, const NormParams& p) {
  if (y.size() != p.size()) {
    throw ShapeError("denormalize: vector width " + std::to_string(y.size()) +
                     " != parameter count " + std::to_string(p.size()));
  }
  std::vector<double> out(y.size());
  for (std::size_t c = 0; c < y.size(); ++c) {
    const auto [lo, hi] = p.ranges[c];
    out[c] = (hi == lo) ? lo : (y[c] + 1.0) / 2.0 * (hi - lo) + lo;
  }
  return out;
}

inline Matrix normalize_apply(const Matrix& m, const NormParams& p) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = normalize_apply(m.row(r), p);
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = row[c];
  }
  return out;
}

inline Matrix denormalize(const Matrix& m, const NormParams& p) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = denormalize(m.row(r), p);
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = row[c];
  }
  return out;
}

}  // namespace matbridge
