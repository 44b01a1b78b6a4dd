#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "matbridge/model_io.hpp"
#include "matbridge/rng.hpp"
#include "matbridge/training.hpp"

using namespace matbridge;
using testutil::TempFile;

namespace {

ModelBundle fresh_bundle(std::uint64_t seed) {
  ModelBundle bundle;
  bundle.network =
      init_network({16, 10, 5}, {TransferKind::tansig, TransferKind::purelin}, seed);
  bundle.schema = default_schema();
  Rng rng(seed + 1);
  for (std::size_t c = 0; c < 16; ++c) {
    const double lo = rng.uniform(-10, 10);
    bundle.norm_in.ranges.push_back({lo, lo + rng.uniform(0.1, 20)});
  }
  for (std::size_t c = 0; c < 5; ++c) {
    const double lo = rng.uniform(0.1, 100);
    bundle.norm_out.ranges.push_back({lo, lo + rng.uniform(0.1, 1000)});
  }
  bundle.train_fingerprint = "seed=" + std::to_string(seed) + " data=unit-test";
  return bundle;
}

double max_prediction_gap(const ModelBundle& a, const ModelBundle& b, int trials,
                          std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(a.schema.input_width());
    for (std::size_t c = 0; c < x.size(); ++c) {
      x[c] = rng.uniform(a.norm_in.ranges[c].first, a.norm_in.ranges[c].second);
    }
    const auto ya = a.predict(x);
    const auto yb = b.predict(x);
    for (std::size_t i = 0; i < ya.size(); ++i) {
      worst = std::max(worst, std::abs(ya[i] - yb[i]));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("model round trip of a fresh network is exact", "[model_io]") {
  const ModelBundle bundle = fresh_bundle(7);
  TempFile tmp("matbridge_model_fresh.txt");
  save_model(bundle, tmp.str());
  const ModelBundle loaded = load_model(tmp.str());
  CHECK(loaded.network == bundle.network);
  CHECK(loaded.norm_in == bundle.norm_in);
  CHECK(loaded.norm_out == bundle.norm_out);
  CHECK(loaded.schema == bundle.schema);
  CHECK(loaded.train_fingerprint == bundle.train_fingerprint);
  CHECK(max_prediction_gap(bundle, loaded, 20, 3) == 0.0);
}

TEST_CASE("model round trip of a trained network is exact on 100 inputs", "[model_io]") {
  ModelBundle bundle = fresh_bundle(11);
  Rng rng(12);
  Matrix in(12, 16), tg(12, 5);
  for (double& v : in.data()) v = rng.uniform(-1, 1);
  for (double& v : tg.data()) v = rng.uniform(-1, 1);
  TrainConfig cfg;
  cfg.max_epochs = 200;
  auto [trained, history] = train(bundle.network, in, tg, cfg);
  bundle.network = std::move(trained);

  TempFile tmp("matbridge_model_trained.txt");
  save_model(bundle, tmp.str());
  const ModelBundle loaded = load_model(tmp.str());
  CHECK(max_prediction_gap(bundle, loaded, 100, 13) == 0.0);
}

TEST_CASE("model file carries the format marker", "[model_io]") {
  const std::string text = format_model(fresh_bundle(1));
  CHECK(text.rfind("matbridge-model/1\n", 0) == 0);
}

TEST_CASE("loading a truncated model file fails with a parse error", "[model_io]") {
  const std::string text = format_model(fresh_bundle(2));
  TempFile tmp("matbridge_model_trunc.txt");
  write_text_file(tmp.str(), text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_model(tmp.str()), ParseError);
}

TEST_CASE("parse errors name the offending field", "[model_io]") {
  std::string text = format_model(fresh_bundle(3));
  const auto pos = text.find("weights ");
  text.replace(pos + 8, 3, "wat");
  try {
    parse_model(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("weights") != std::string::npos);
  }
}

TEST_CASE("mismatched normalization widths fail compatibility on load", "[model_io]") {
  std::string text = format_model(fresh_bundle(4));
  // drop one input normalization line
  const auto pos = text.find("norm input");
  const auto end = text.find('\n', pos);
  text.erase(pos, end - pos + 1);
  CHECK_THROWS_AS(parse_model(text), CompatibilityError);
}

TEST_CASE("missing file is an I/O error", "[model_io]") {
  CHECK_THROWS_AS(load_model("/nonexistent/matbridge/model.txt"), IoError);
}

TEST_CASE("bundle validate rejects inconsistent widths", "[model_io]") {
  ModelBundle bundle = fresh_bundle(5);
  bundle.norm_in.ranges.pop_back();
  CHECK_THROWS_AS(bundle.validate(), CompatibilityError);
}
