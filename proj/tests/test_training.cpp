#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include "matbridge/rng.hpp"
#include "matbridge/training.hpp"

using namespace matbridge;

namespace {

Matrix to_matrix(std::size_t rows, std::size_t cols, const std::vector<double>& v) {
  Matrix m(rows, cols);
  m.data() = v;
  return m;
}

Network scalar_net(double weight, double bias, TransferKind tf = TransferKind::purelin) {
  Layer l;
  l.weights = Matrix(1, 1);
  l.weights(0, 0) = weight;
  l.biases = {bias};
  l.transfer = tf;
  return Network(1, {l});
}

double perf_of(const Network& net, const Matrix& in, const Matrix& tg, double gamma) {
  return msereg_perf(tg, forward_trace(net, in).output(), net, gamma);
}

// Central finite differences over every parameter; depends only on the
// forward pass and the performance formula, never on backprop itself.
GradientSet fd_gradients(const Network& net, const Matrix& in, const Matrix& tg, double gamma,
                         double h = 1e-5) {
  GradientSet fd = GradientSet::zeros_like(net);
  Network work = net;
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    for (std::size_t i = 0; i < net.layer(k).weights.size(); ++i) {
      double& w = work.layer(k).weights.data()[i];
      const double saved = w;
      w = saved + h;
      const double up = perf_of(work, in, tg, gamma);
      w = saved - h;
      const double down = perf_of(work, in, tg, gamma);
      w = saved;
      fd.weights[k].data()[i] = (up - down) / (2.0 * h);
    }
    for (std::size_t j = 0; j < net.layer(k).biases.size(); ++j) {
      double& b = work.layer(k).biases[j];
      const double saved = b;
      b = saved + h;
      const double up = perf_of(work, in, tg, gamma);
      b = saved - h;
      const double down = perf_of(work, in, tg, gamma);
      b = saved;
      fd.biases[k][j] = (up - down) / (2.0 * h);
    }
  }
  return fd;
}

bool grads_agree(const GradientSet& a, const GradientSet& b) {
  auto close = [](double x, double y) {
    return std::abs(x - y) <= std::max(1e-8, 1e-5 * std::max(std::abs(x), std::abs(y)));
  };
  for (std::size_t k = 0; k < a.weights.size(); ++k) {
    for (std::size_t i = 0; i < a.weights[k].size(); ++i) {
      if (!close(a.weights[k].data()[i], b.weights[k].data()[i])) return false;
    }
    for (std::size_t j = 0; j < a.biases[k].size(); ++j) {
      if (!close(a.biases[k][j], b.biases[k][j])) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("msereg_perf vanishes for perfect zero-weight nets", "[training]") {
  Network net = scalar_net(0.0, 0.0);
  Matrix t = to_matrix(1, 1, {0.5});
  CHECK(msereg_perf(t, t, net, 0.3) == 0.0);
}

TEST_CASE("msereg_perf is plain MSE at gamma 1", "[training]") {
  Network net = scalar_net(2.0, 0.0);
  CHECK(msereg_perf(to_matrix(1, 1, {1.0}), to_matrix(1, 1, {0.0}), net, 1.0) == 1.0);
}

TEST_CASE("msereg_perf hand-worked blend", "[training]") {
  // gamma=0.1, weight 2, bias 0: 0.1*1 + 0.9*(4+0)/2 = 1.9
  Network net = scalar_net(2.0, 0.0);
  const double perf =
      msereg_perf(to_matrix(1, 1, {0.0}), to_matrix(1, 1, {1.0}), net, 0.1);
  CHECK(perf == Catch::Approx(1.9).epsilon(1e-15));
}

TEST_CASE("msereg_perf equals an independent MSE sum at gamma 1", "[training]") {
  Network net = scalar_net(1.0, 0.0);
  Rng rng(4);
  Matrix t(7, 3), o(7, 3);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.data()[i] = rng.uniform(-2, 2);
    o.data()[i] = rng.uniform(-2, 2);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    acc += (t.data()[i] - o.data()[i]) * (t.data()[i] - o.data()[i]);
  }
  CHECK(std::abs(msereg_perf(t, o, net, 1.0) - acc / 21.0) <= 1e-15);
}

TEST_CASE("msereg_perf rejects shape mismatch", "[training]") {
  Network net = scalar_net(1.0, 0.0);
  CHECK_THROWS_AS(msereg_perf(Matrix(2, 1), Matrix(1, 1), net, 1.0), ShapeError);
}

TEST_CASE("backprop gradient is zero for a perfect fit at gamma 1", "[training]") {
  Network net = init_network({3, 4, 2}, {TransferKind::tansig, TransferKind::purelin}, 3);
  Rng rng(17);
  Matrix in(5, 3);
  for (double& v : in.data()) v = rng.uniform(-1, 1);
  const Matrix out = forward_trace(net, in).output();
  const GradientSet g = backprop_gradients(net, in, out, 1.0);
  for (const Matrix& gw : g.weights) {
    for (double v : gw.data()) CHECK(v == 0.0);
  }
  for (const auto& gb : g.biases) {
    for (double v : gb) CHECK(v == 0.0);
  }
}

TEST_CASE("backprop matches the analytic scalar case", "[training]") {
  // single purelin weight w, one record (x=1, t=0), gamma=1: d/dw (w)^2 = 2w
  for (double w : {0.3, -1.7, 2.0}) {
    Network net = scalar_net(w, 0.0);
    const GradientSet g =
        backprop_gradients(net, to_matrix(1, 1, {1.0}), to_matrix(1, 1, {0.0}), 1.0);
    CHECK(g.weights[0](0, 0) == Catch::Approx(2.0 * w).epsilon(1e-14));
  }
}

TEST_CASE("backprop matches finite differences on a 16-10-5 batch", "[training]") {
  Network net = init_network({16, 10, 5}, {TransferKind::tansig, TransferKind::purelin}, 21);
  Rng rng(22);
  Matrix in(8, 16), tg(8, 5);
  for (double& v : in.data()) v = rng.uniform(-1, 1);
  for (double& v : tg.data()) v = rng.uniform(-1, 1);
  const GradientSet analytic = backprop_gradients(net, in, tg, 0.1);
  const GradientSet fd = fd_gradients(net, in, tg, 0.1);
  CHECK(grads_agree(analytic, fd));
}

TEST_CASE("backprop matches finite differences across random small nets", "[training]") {
  Rng rng(2024);
  const TransferKind kinds[] = {TransferKind::tansig, TransferKind::logsig,
                                TransferKind::purelin};
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t depth = 1 + rng.index(3);
    std::vector<std::size_t> sizes{1 + rng.index(6)};
    std::vector<TransferKind> transfers;
    for (std::size_t k = 0; k < depth; ++k) {
      sizes.push_back(1 + rng.index(6));
      transfers.push_back(kinds[rng.index(3)]);
    }
    Network net = init_network(sizes, transfers, 1000 + trial);
    const std::size_t records = 1 + rng.index(6);
    Matrix in(records, sizes.front()), tg(records, sizes.back());
    for (double& v : in.data()) v = rng.uniform(-1.5, 1.5);
    for (double& v : tg.data()) v = rng.uniform(-1.5, 1.5);
    const double gamma = (trial % 2 == 0) ? 0.1 : 1.0;
    CHECK(grads_agree(backprop_gradients(net, in, tg, gamma),
                      fd_gradients(net, in, tg, gamma)));
  }
}

TEST_CASE("gdm_step without momentum is plain descent", "[training]") {
  Network net = scalar_net(1.0, 0.5);
  GradientSet g = GradientSet::zeros_like(net);
  g.weights[0](0, 0) = 2.0;
  g.biases[0][0] = -1.0;
  Velocity vel = Velocity::zeros_like(net);
  gdm_step(net, g, vel, 0.1, 0.0);
  CHECK(net.layer(0).weights(0, 0) == Catch::Approx(1.0 - 0.1 * 2.0).epsilon(1e-15));
  CHECK(net.layer(0).biases[0] == Catch::Approx(0.5 + 0.1).epsilon(1e-15));
}

TEST_CASE("gdm_step with zero rate and velocity is a null step", "[training]") {
  Network net = scalar_net(1.25, -0.5);
  Network before = net;
  GradientSet g = GradientSet::zeros_like(net);
  g.weights[0](0, 0) = 5.0;
  Velocity vel = Velocity::zeros_like(net);
  gdm_step(net, g, vel, 0.0, 0.9);
  CHECK(net == before);
}

TEST_CASE("gdm_step two-step hand iteration", "[training]") {
  // constant g=1, lr=0.1, mc=0.9: delta1 = -0.01, delta2 = 0.9*(-0.01) - 0.01 = -0.019
  Network net = scalar_net(0.0, 0.0);
  GradientSet g = GradientSet::zeros_like(net);
  g.weights[0](0, 0) = 1.0;
  Velocity vel = Velocity::zeros_like(net);

  gdm_step(net, g, vel, 0.1, 0.9);
  CHECK(vel.weights[0](0, 0) == Catch::Approx(-0.01).epsilon(1e-15));
  CHECK(net.layer(0).weights(0, 0) == Catch::Approx(-0.01).epsilon(1e-15));

  gdm_step(net, g, vel, 0.1, 0.9);
  CHECK(vel.weights[0](0, 0) == Catch::Approx(-0.019).epsilon(1e-15));
  CHECK(net.layer(0).weights(0, 0) == Catch::Approx(-0.029).epsilon(1e-15));
}

TEST_CASE("train stops immediately when the goal is already met", "[training]") {
  Network net = init_network({2, 3, 1}, {TransferKind::tansig, TransferKind::purelin}, 9);
  Rng rng(10);
  Matrix in(4, 2), tg(4, 1);
  for (double& v : in.data()) v = rng.uniform(-1, 1);
  for (double& v : tg.data()) v = rng.uniform(-1, 1);

  TrainConfig cfg;
  cfg.performance_ratio = 1.0;
  cfg.goal = perf_of(net, in, tg, 1.0);
  cfg.max_epochs = 100;
  auto [trained, history] = train(net, in, tg, cfg);
  CHECK(history.stop_reason == StopReason::goal_reached);
  REQUIRE(history.records.size() == 1);
  CHECK(history.records[0].epoch == 0);
  CHECK(history.final_performance <= cfg.goal);
  CHECK(trained == net);
}

TEST_CASE("train respects the epoch bound", "[training]") {
  Network net = init_network({2, 2, 1}, {TransferKind::tansig, TransferKind::purelin}, 30);
  Matrix in = to_matrix(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
  Matrix tg = to_matrix(4, 1, {0, 1, 1, 0});
  TrainConfig cfg;
  cfg.performance_ratio = 1.0;
  cfg.max_epochs = 5;
  auto [trained, history] = train(net, in, tg, cfg);
  CHECK(history.records.size() <= 5);
  CHECK((history.stop_reason == StopReason::max_epochs ||
         history.stop_reason == StopReason::gradient_vanished));
  for (std::size_t i = 1; i < history.records.size(); ++i) {
    CHECK(history.records[i].epoch > history.records[i - 1].epoch);
  }
}

TEST_CASE("train with mc=0 gamma=1 equals a naive descent loop", "[training]") {
  Network net = init_network({3, 4, 2}, {TransferKind::tansig, TransferKind::purelin}, 55);
  Rng rng(56);
  Matrix in(6, 3), tg(6, 2);
  for (double& v : in.data()) v = rng.uniform(-1, 1);
  for (double& v : tg.data()) v = rng.uniform(-1, 1);

  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.momentum = 0.0;
  cfg.performance_ratio = 1.0;
  cfg.max_epochs = 100;
  cfg.min_grad = 0.0;
  auto [trained, history] = train(net, in, tg, cfg);

  // naive loop: parameter -= lr * dMSE/dparameter, 100 epochs
  Network naive = net;
  for (int epoch = 0; epoch < 100; ++epoch) {
    const GradientSet g = backprop_gradients(naive, in, tg, 1.0);
    for (std::size_t k = 0; k < naive.layer_count(); ++k) {
      for (std::size_t i = 0; i < naive.layer(k).weights.size(); ++i) {
        naive.layer(k).weights.data()[i] -= cfg.learning_rate * g.weights[k].data()[i];
      }
      for (std::size_t j = 0; j < naive.layer(k).biases.size(); ++j) {
        naive.layer(k).biases[j] -= cfg.learning_rate * g.biases[k][j];
      }
    }
  }

  for (std::size_t k = 0; k < trained.layer_count(); ++k) {
    for (std::size_t i = 0; i < trained.layer(k).weights.size(); ++i) {
      CHECK(std::abs(trained.layer(k).weights.data()[i] -
                     naive.layer(k).weights.data()[i]) <= 1e-12);
    }
    for (std::size_t j = 0; j < trained.layer(k).biases.size(); ++j) {
      CHECK(std::abs(trained.layer(k).biases[j] - naive.layer(k).biases[j]) <= 1e-12);
    }
  }
}

TEST_CASE("train is bit-deterministic", "[training]") {
  Matrix in = to_matrix(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
  Matrix tg = to_matrix(4, 1, {0, 1, 1, 0});
  TrainConfig cfg;
  cfg.performance_ratio = 1.0;
  cfg.learning_rate = 0.5;
  cfg.max_epochs = 500;

  auto run = [&] {
    Network net =
        init_network({2, 2, 1}, {TransferKind::tansig, TransferKind::purelin}, cfg.seed);
    return train(net, in, tg, cfg);
  };
  auto [net_a, hist_a] = run();
  auto [net_b, hist_b] = run();
  CHECK(net_a == net_b);
  REQUIRE(hist_a.records.size() == hist_b.records.size());
  for (std::size_t i = 0; i < hist_a.records.size(); ++i) {
    CHECK(hist_a.records[i].epoch == hist_b.records[i].epoch);
    CHECK(std::memcmp(&hist_a.records[i].performance, &hist_b.records[i].performance,
                      sizeof(double)) == 0);
    CHECK(std::memcmp(&hist_a.records[i].grad_norm, &hist_b.records[i].grad_norm,
                      sizeof(double)) == 0);
  }
}

TEST_CASE("train XOR converges for a known seed", "[training]") {
  Matrix in = to_matrix(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
  Matrix tg = to_matrix(4, 1, {0, 1, 1, 0});
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.momentum = 0.9;
  cfg.performance_ratio = 1.0;
  cfg.goal = 0.05;
  cfg.max_epochs = 50000;
  Network net = init_network({2, 2, 1}, {TransferKind::tansig, TransferKind::purelin}, 1);
  auto [trained, history] = train(net, in, tg, cfg);
  CHECK(history.stop_reason == StopReason::goal_reached);
  CHECK(history.final_performance < 0.05);
}

TEST_CASE("train rejects empty data and bad config", "[training]") {
  Network net = scalar_net(1.0, 0.0);
  TrainConfig cfg;
  CHECK_THROWS_AS(train(net, Matrix(0, 1), Matrix(0, 1), cfg), ConfigError);
  TrainConfig bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(train(net, Matrix(1, 1, 0.5), Matrix(1, 1, 0.5), bad), ConfigError);
  bad = cfg;
  bad.momentum = 1.0;
  CHECK_THROWS_AS(train(net, Matrix(1, 1, 0.5), Matrix(1, 1, 0.5), bad), ConfigError);
  bad = cfg;
  bad.performance_ratio = 0.0;
  CHECK_THROWS_AS(train(net, Matrix(1, 1, 0.5), Matrix(1, 1, 0.5), bad), ConfigError);
}

TEST_CASE("history csv round trip", "[training]") {
  TrainHistory history;
  history.stop_reason = StopReason::gradient_vanished;
  history.records = {{1, 0.5, 0.25}, {2, 0.40000000000000002, 0.125}, {17, 1e-9, 1e-11}};
  history.epochs_run = 17;
  history.final_performance = 1e-9;

  const auto path = std::filesystem::temp_directory_path() / "matbridge_hist_test.csv";
  write_history_csv(history, path.string(), "cfg=unit-test");
  const TrainHistory loaded = load_history_csv(path.string());
  std::filesystem::remove(path);

  CHECK(loaded.stop_reason == StopReason::gradient_vanished);
  REQUIRE(loaded.records.size() == history.records.size());
  for (std::size_t i = 0; i < loaded.records.size(); ++i) {
    CHECK(loaded.records[i].epoch == history.records[i].epoch);
    CHECK(loaded.records[i].performance == history.records[i].performance);
    CHECK(loaded.records[i].grad_norm == history.records[i].grad_norm);
  }
}
