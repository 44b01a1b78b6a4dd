#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "matbridge/plot.hpp"

using namespace matbridge;

namespace {

TrainHistory make_history(std::size_t epochs, bool monotone) {
  TrainHistory h;
  double perf = 1.0;
  for (std::size_t e = 1; e <= epochs; ++e) {
    perf = monotone ? perf * 0.97 : perf * (e % 3 == 0 ? 1.08 : 0.9);
    h.records.push_back({e, perf, perf * 0.1});
  }
  h.stop_reason = StopReason::max_epochs;
  h.epochs_run = epochs;
  h.final_performance = perf;
  return h;
}

std::vector<std::pair<double, double>> polyline_points(const std::string& svg) {
  const auto start = svg.find("points=\"");
  REQUIRE(start != std::string::npos);
  const auto end = svg.find('"', start + 8);
  std::istringstream in(svg.substr(start + 8, end - start - 8));
  std::vector<std::pair<double, double>> pts;
  std::string pair;
  while (in >> pair) {
    const auto comma = pair.find(',');
    pts.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
  }
  return pts;
}

}  // namespace

TEST_CASE("svg has one polyline point per record", "[plot]") {
  const TrainHistory h = make_history(100, false);
  const std::string svg = render_history_svg(h);
  CHECK(polyline_points(svg).size() == 100);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("performance (msereg") != std::string::npos);
}

TEST_CASE("monotone history yields monotone polyline y", "[plot]") {
  const TrainHistory h = make_history(60, true);
  const auto pts = polyline_points(render_history_svg(h));
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].first >= pts[i - 1].first);   // x advances
    CHECK(pts[i].second >= pts[i - 1].second); // decreasing perf moves down the canvas
  }
}

TEST_CASE("empty history is a configuration error", "[plot]") {
  CHECK_THROWS_AS(render_history_svg(TrainHistory{}), ConfigError);
  CHECK_THROWS_AS(format_downsampled_csv(TrainHistory{}), ConfigError);
}

TEST_CASE("single-record history renders", "[plot]") {
  TrainHistory h;
  h.records.push_back({0, 0.5, 0.1});
  const std::string svg = render_history_svg(h);
  CHECK(polyline_points(svg).size() == 1);
}

TEST_CASE("downsampled records are a subset of the history", "[plot]") {
  const TrainHistory h = make_history(5000, true);
  const auto picked = downsample_log(h.records, 64);
  CHECK(picked.size() <= 65);
  CHECK(picked.front().epoch == h.records.front().epoch);
  CHECK(picked.back().epoch == h.records.back().epoch);
  std::size_t cursor = 0;
  for (const TrainRecord& r : picked) {
    while (cursor < h.records.size() && h.records[cursor].epoch != r.epoch) ++cursor;
    REQUIRE(cursor < h.records.size());  // every pick exists in the source
    CHECK(h.records[cursor].performance == r.performance);
    CHECK(h.records[cursor].grad_norm == r.grad_norm);
  }
  // log spacing: more resolution early than late
  std::size_t below = 0;
  for (const TrainRecord& r : picked) {
    if (r.epoch <= 500) ++below;
  }
  CHECK(below > picked.size() / 4);
}

TEST_CASE("short histories pass through the downsampler unchanged", "[plot]") {
  const TrainHistory h = make_history(20, false);
  const auto picked = downsample_log(h.records, 200);
  CHECK(picked.size() == h.records.size());
}

TEST_CASE("downsampled csv parses as a history", "[plot]") {
  const TrainHistory h = make_history(3000, true);
  const std::string csv = format_downsampled_csv(h, 50);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == std::string(kHistoryHeader));
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows <= 51);
  CHECK(rows >= 2);
}
