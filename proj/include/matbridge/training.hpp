#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "matbridge/errors.hpp"
#include "matbridge/linalg.hpp"
#include "matbridge/network.hpp"
#include "matbridge/text.hpp"

namespace matbridge {

// Batch gradient descent with momentum under the regularized performance
// function perf = gamma * MSE + (1 - gamma) * MSW, where MSE is the mean
// squared error over all output entries and MSW the mean of squared weights
// and biases.
struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double performance_ratio = 0.1;  // gamma; 1 reduces to plain MSE
  double goal = 0.0;
  std::size_t max_epochs = 200000;
  double min_grad = 1e-10;  // plateau stop: training "fully trained" short of the goal
  std::size_t log_every = 100;
  std::uint64_t seed = 42;  // used by callers for init/split; recorded in provenance

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
    if (!(performance_ratio > 0.0 && performance_ratio <= 1.0)) {
      throw ConfigError("performance_ratio must be in (0, 1]");
    }
    if (!(goal >= 0.0)) throw ConfigError("goal must be nonnegative");
    if (max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
    if (!(min_grad >= 0.0)) throw ConfigError("min_grad must be nonnegative");
    if (log_every == 0) throw ConfigError("log_every must be at least 1");
  }
};

enum class StopReason { goal_reached, max_epochs, gradient_vanished };

inline std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::goal_reached: return "goal_reached";
    case StopReason::max_epochs: return "max_epochs";
    case StopReason::gradient_vanished: return "gradient_vanished";
  }
  return "?";
}

struct TrainRecord {
  std::size_t epoch;
  double performance;
  double grad_norm;
};

struct TrainHistory {
  std::vector<TrainRecord> records;
  StopReason stop_reason = StopReason::max_epochs;
  std::size_t epochs_run = 0;
  double final_performance = 0.0;
};

// Per-layer gradient (or velocity) storage, shapes mirroring the network.
struct GradientSet {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static GradientSet zeros_like(const Network& net) {
    GradientSet g;
    g.weights.reserve(net.layer_count());
    g.biases.reserve(net.layer_count());
    for (const Layer& l : net.layers()) {
      g.weights.emplace_back(l.weights.rows(), l.weights.cols());
      g.biases.emplace_back(l.biases.size(), 0.0);
    }
    return g;
  }
};

using Velocity = GradientSet;

inline double grad_norm(const GradientSet& g) {
  double sum = 0.0;
  for (const Matrix& m : g.weights) {
    for (double v : m.data()) sum += v * v;
  }
  for (const auto& b : g.biases) {
    for (double v : b) sum += v * v;
  }
  return std::sqrt(sum);
}

// gamma * MSE + (1 - gamma) * MSW; gamma = 1 is exactly MSE.
inline double msereg_perf(const Matrix& targets, const Matrix& outputs, const Network& net,
                          double gamma) {
  if (!targets.same_shape(outputs)) {
    throw ShapeError("msereg_perf: targets and outputs differ in shape");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("msereg_perf: gamma must be in (0, 1]");
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = outputs.data()[i] - targets.data()[i];
    sq += d * d;
  }
  const double mse = targets.size() ? sq / static_cast<double>(targets.size()) : 0.0;
  if (gamma == 1.0) return mse;

  double wsq = 0.0;
  for (const Layer& l : net.layers()) {
    for (double w : l.weights.data()) wsq += w * w;
    for (double b : l.biases) wsq += b * b;
  }
  const double msw = wsq / static_cast<double>(net.parameter_count());
  return gamma * mse + (1.0 - gamma) * msw;
}

namespace detail {

struct BatchEval {
  double performance;
  double mse;
  GradientSet grads;
};

// One forward plus one backward pass; exact analytic gradient of msereg_perf
// with respect to every weight and bias.
inline BatchEval eval_batch(const Network& net, const Matrix& inputs, const Matrix& targets,
                            double gamma) {
  if (targets.rows() != inputs.rows()) {
    throw ShapeError("training: inputs and targets disagree on record count");
  }
  if (targets.cols() != net.output_width()) {
    throw ShapeError("training: target width " + std::to_string(targets.cols()) +
                     " != network output width " + std::to_string(net.output_width()));
  }

  const ForwardTrace trace = forward_trace(net, inputs);
  const Matrix& out = trace.output();

  BatchEval eval;
  eval.grads = GradientSet::zeros_like(net);

  const double entries = static_cast<double>(targets.size());
  double sq = 0.0;
  const std::size_t p = inputs.rows();

  // delta = d(MSE)/d(activation), propagated backwards layer by layer
  Matrix delta(p, net.output_width());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double d = out.data()[i] - targets.data()[i];
    sq += d * d;
    delta.data()[i] = 2.0 * d / entries;
  }
  eval.mse = sq / entries;

  for (std::size_t k = net.layer_count(); k-- > 0;) {
    const Layer& l = net.layer(k);
    const Matrix& z = trace.pre_activations[k];
    const Matrix& prev = trace.activations[k];

    Matrix dz(p, l.neurons());
    if (l.transfer == TransferKind::purelin) {
      dz = delta;
    } else {
      for (std::size_t i = 0; i < z.size(); ++i) {
        dz.data()[i] = delta.data()[i] * transfer_deriv(l.transfer, z.data()[i]);
      }
    }

    Matrix& gw = eval.grads.weights[k];
    std::vector<double>& gb = eval.grads.biases[k];
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t j = 0; j < l.neurons(); ++j) {
        const double dzj = dz(r, j);
        gb[j] += dzj;
        for (std::size_t i = 0; i < l.fan_in(); ++i) {
          gw(j, i) += dzj * prev(r, i);
        }
      }
    }

    if (k > 0) {
      Matrix next_delta(p, l.fan_in());
      for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t i = 0; i < l.fan_in(); ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < l.neurons(); ++j) {
            acc += dz(r, j) * l.weights(j, i);
          }
          next_delta(r, i) = acc;
        }
      }
      delta = std::move(next_delta);
    }
  }

  if (gamma == 1.0) {
    eval.performance = eval.mse;
    return eval;
  }

  // blend in the regularizer: perf = gamma*MSE + (1-gamma)*mean(theta^2)
  const double n_params = static_cast<double>(net.parameter_count());
  double wsq = 0.0;
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const Layer& l = net.layer(k);
    Matrix& gw = eval.grads.weights[k];
    std::vector<double>& gb = eval.grads.biases[k];
    for (std::size_t i = 0; i < l.weights.size(); ++i) {
      const double w = l.weights.data()[i];
      wsq += w * w;
      gw.data()[i] = gamma * gw.data()[i] + (1.0 - gamma) * 2.0 * w / n_params;
    }
    for (std::size_t j = 0; j < l.biases.size(); ++j) {
      const double b = l.biases[j];
      wsq += b * b;
      gb[j] = gamma * gb[j] + (1.0 - gamma) * 2.0 * b / n_params;
    }
  }
  eval.performance = gamma * eval.mse + (1.0 - gamma) * wsq / n_params;
  return eval;
}

}  // namespace detail

inline GradientSet backprop_gradients(const Network& net, const Matrix& inputs,
                                      const Matrix& targets, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("backprop_gradients: gamma must be in (0, 1]");
  }
  return detail::eval_batch(net, inputs, targets, gamma).grads;
}

// Momentum update: delta = mc * delta_prev - (1 - mc) * lr * g; theta += delta.
// The velocity keeps the applied delta for the next step.
inline void gdm_step(Network& net, const GradientSet& grads, Velocity& vel, double lr,
                     double mc) {
  if (grads.weights.size() != net.layer_count() || vel.weights.size() != net.layer_count()) {
    throw ShapeError("gdm_step: gradient/velocity layer count mismatch");
  }
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    Layer& l = net.layer(k);
    const Matrix& gw = grads.weights[k];
    Matrix& vw = vel.weights[k];
    if (!gw.same_shape(l.weights) || !vw.same_shape(l.weights) ||
        grads.biases[k].size() != l.biases.size() || vel.biases[k].size() != l.biases.size()) {
      throw ShapeError("gdm_step: shape mismatch at layer " + std::to_string(k));
    }
    for (std::size_t i = 0; i < l.weights.size(); ++i) {
      const double d = mc * vw.data()[i] - (1.0 - mc) * lr * gw.data()[i];
      vw.data()[i] = d;
      l.weights.data()[i] += d;
    }
    for (std::size_t j = 0; j < l.biases.size(); ++j) {
      const double d = mc * vel.biases[k][j] - (1.0 - mc) * lr * grads.biases[k][j];
      vel.biases[k][j] = d;
      l.biases[j] += d;
    }
  }
}

// Full-batch training loop. History records are written after each update
// (every log_every epochs plus the stopping epoch); a run that already meets
// the goal records epoch 0 alone. Deterministic given identical inputs.
inline std::pair<Network, TrainHistory> train(Network net, const Matrix& inputs,
                                              const Matrix& targets, const TrainConfig& cfg) {
  cfg.validate();
  if (inputs.rows() == 0) throw ConfigError("train: empty dataset");

  TrainHistory history;
  Velocity vel = Velocity::zeros_like(net);

  detail::BatchEval eval =
      detail::eval_batch(net, inputs, targets, cfg.performance_ratio);
  double gnorm = grad_norm(eval.grads);

  if (eval.performance <= cfg.goal) {
    history.records.push_back({0, eval.performance, gnorm});
    history.stop_reason = StopReason::goal_reached;
    history.final_performance = eval.performance;
    return {std::move(net), std::move(history)};
  }
  if (gnorm < cfg.min_grad) {
    history.records.push_back({0, eval.performance, gnorm});
    history.stop_reason = StopReason::gradient_vanished;
    history.final_performance = eval.performance;
    return {std::move(net), std::move(history)};
  }

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    gdm_step(net, eval.grads, vel, cfg.learning_rate, cfg.momentum);
    eval = detail::eval_batch(net, inputs, targets, cfg.performance_ratio);
    gnorm = grad_norm(eval.grads);

    if (!std::isfinite(eval.performance)) {
      throw NumericError("train: performance non-finite at epoch " + std::to_string(epoch) +
                         " (last good epoch " + std::to_string(epoch - 1) + ")");
    }

    const bool due = (epoch % cfg.log_every == 0);
    bool stop = false;
    if (eval.performance <= cfg.goal) {
      history.stop_reason = StopReason::goal_reached;
      stop = true;
    } else if (gnorm < cfg.min_grad) {
      history.stop_reason = StopReason::gradient_vanished;
      stop = true;
    } else if (epoch == cfg.max_epochs) {
      history.stop_reason = StopReason::max_epochs;
      stop = true;
    }
    if (due || stop) {
      if (history.records.empty() || history.records.back().epoch != epoch) {
        history.records.push_back({epoch, eval.performance, gnorm});
      }
    }
    if (stop) {
      history.epochs_run = epoch;
      break;
    }
  }

  history.final_performance = eval.performance;
  return {std::move(net), std::move(history)};
}

inline constexpr std::string_view kHistoryHeader = "epoch,performance,grad_norm";

inline std::string format_history_csv(const TrainHistory& history,
                                      const std::string& provenance = {}) {
  std::ostringstream out;
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "# stop_reason=" << stop_reason_name(history.stop_reason) << "\n";
  out << kHistoryHeader << "\n";
  for (const TrainRecord& r : history.records) {
    out << r.epoch << "," << fmt_double(r.performance) << "," << fmt_double(r.grad_norm)
        << "\n";
  }
  return out.str();
}

inline void write_history_csv(const TrainHistory& history, const std::string& path,
                              const std::string& provenance = {}) {
  write_text_file(path, format_history_csv(history, provenance));
}

inline TrainHistory load_history_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  TrainHistory history;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string_view tag = "# stop_reason=";
      if (text.substr(0, tag.size()) == tag) {
        const std::string_view name = trim(text.substr(tag.size()));
        if (name == "goal_reached") history.stop_reason = StopReason::goal_reached;
        else if (name == "gradient_vanished") history.stop_reason = StopReason::gradient_vanished;
        else history.stop_reason = StopReason::max_epochs;
      }
      continue;
    }
    if (!have_header) {
      if (text != kHistoryHeader) {
        throw ParseError(path + ": expected header '" + std::string(kHistoryHeader) + "'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_fields(text, ',');
    if (fields.size() != 3) {
      throw ParseError(path + " line " + std::to_string(line_no) + ": expected 3 fields");
    }
    TrainRecord rec;
    rec.epoch = parse_count(fields[0], path + " epoch");
    rec.performance = parse_double(fields[1], path + " performance");
    rec.grad_norm = parse_double(fields[2], path + " grad_norm");
    if (!history.records.empty() && rec.epoch <= history.records.back().epoch) {
      throw ParseError(path + ": epochs not strictly increasing at line " +
                       std::to_string(line_no));
    }
    history.records.push_back(rec);
  }
  if (!have_header) throw ParseError(path + ": missing history header");
  if (!history.records.empty()) {
    history.epochs_run = history.records.back().epoch;
    history.final_performance = history.records.back().performance;
  }
  return history;
}

}  // namespace matbridge
