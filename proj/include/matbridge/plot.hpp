#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "matbridge/errors.hpp"
#include "matbridge/training.hpp"

namespace matbridge {

// Emits the performance-vs-epoch curve as a self-contained SVG line chart.
// The y axis switches to log scale when the trace spans over two decades;
// both scalings are monotone, so a monotone history stays a monotone polyline.

namespace detail {

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5g", v);
  return buf;
}

}  // namespace detail

inline std::string render_history_svg(const TrainHistory& history,
                                      const std::string& provenance = {}) {
  if (history.records.empty()) {
    throw ConfigError("render_history_svg: empty history");
  }

  const double width = 800, height = 500;
  const double left = 80, right = 20, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double e_min = static_cast<double>(history.records.front().epoch);
  double e_max = static_cast<double>(history.records.back().epoch);
  double p_min = history.records.front().performance;
  double p_max = p_min;
  for (const TrainRecord& r : history.records) {
    p_min = std::min(p_min, r.performance);
    p_max = std::max(p_max, r.performance);
  }
  const bool log_y = p_min > 0.0 && p_max / p_min > 100.0;

  auto y_value = [&](double perf) { return log_y ? std::log10(perf) : perf; };
  const double y_lo = y_value(p_min);
  const double y_hi = y_value(p_max);

  auto x_px = [&](double epoch) {
    if (e_max == e_min) return left + plot_w / 2.0;
    return left + (epoch - e_min) / (e_max - e_min) * plot_w;
  };
  auto y_px = [&](double perf) {
    if (y_hi == y_lo) return top + plot_h / 2.0;
    return top + (1.0 - (y_value(perf) - y_lo) / (y_hi - y_lo)) * plot_h;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  if (!provenance.empty()) svg << "<!-- " << provenance << " -->\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";

  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-size=\"14\">epoch</text>\n";
  svg << "<text x=\"20\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\">performance (msereg" << (log_y ? ", log scale" : "")
      << ")</text>\n";
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">training performance (stop: "
      << stop_reason_name(history.stop_reason) << ")</text>\n";

  svg << "<text x=\"" << left << "\" y=\"" << height - 38
      << "\" text-anchor=\"middle\" font-size=\"12\">" << detail::fmt_tick(e_min)
      << "</text>\n";
  svg << "<text x=\"" << left + plot_w << "\" y=\"" << height - 38
      << "\" text-anchor=\"middle\" font-size=\"12\">" << detail::fmt_tick(e_max)
      << "</text>\n";
  svg << "<text x=\"" << left - 8 << "\" y=\"" << top + 4
      << "\" text-anchor=\"end\" font-size=\"12\">" << detail::fmt_tick(p_max)
      << "</text>\n";
  svg << "<text x=\"" << left - 8 << "\" y=\"" << top + plot_h + 4
      << "\" text-anchor=\"end\" font-size=\"12\">" << detail::fmt_tick(p_min)
      << "</text>\n";

  svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < history.records.size(); ++i) {
    const TrainRecord& r = history.records[i];
    if (i) svg << " ";
    svg << detail::fmt_px(x_px(static_cast<double>(r.epoch))) << ","
        << detail::fmt_px(y_px(r.performance));
  }
  svg << "\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

// Picks a log-spaced subset of the records (first and last always kept).
inline std::vector<TrainRecord> downsample_log(const std::vector<TrainRecord>& records,
                                               std::size_t max_points = 200) {
  if (max_points < 2) throw ConfigError("downsample_log: need at least 2 points");
  if (records.size() <= max_points) return records;

  const double lo = std::log(static_cast<double>(std::max<std::size_t>(records.front().epoch, 1)));
  const double hi = std::log(static_cast<double>(std::max<std::size_t>(records.back().epoch, 1)));
  std::vector<TrainRecord> picked;
  picked.reserve(max_points);
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < max_points; ++k) {
    const double target =
        std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(max_points - 1));
    while (cursor + 1 < records.size() &&
           static_cast<double>(records[cursor].epoch) < target) {
      ++cursor;
    }
    if (picked.empty() || picked.back().epoch != records[cursor].epoch) {
      picked.push_back(records[cursor]);
    }
  }
  if (picked.back().epoch != records.back().epoch) picked.push_back(records.back());
  return picked;
}

inline std::string format_downsampled_csv(const TrainHistory& history,
                                          std::size_t max_points = 200) {
  if (history.records.empty()) {
    throw ConfigError("format_downsampled_csv: empty history");
  }
  const auto picked = downsample_log(history.records, max_points);
  std::ostringstream out;
  out << kHistoryHeader << "\n";
  for (const TrainRecord& r : picked) {
    out << r.epoch << "," << fmt_double(r.performance) << "," << fmt_double(r.grad_norm)
        << "\n";
  }
  return out.str();
}

}  // namespace matbridge
