#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matbridge/errors.hpp"
#include "matbridge/linalg.hpp"
#include "matbridge/rng.hpp"
#include "matbridge/transfer.hpp"

namespace matbridge {

// One fully connected layer: weights (neurons x previous width), one bias per
// neuron, and the transfer function applied to the affine result.
struct Layer {
  Matrix weights;
  std::vector<double> biases;
  TransferKind transfer = TransferKind::purelin;

  std::size_t neurons() const noexcept { return weights.rows(); }
  std::size_t fan_in() const noexcept { return weights.cols(); }
};

// Ordered feed-forward stack. Immutable from the caller's perspective once
// built; training mutates a network it owns exclusively.
class Network {
 public:
  Network() = default;
  Network(std::size_t input_width, std::vector<Layer> layers)
      : input_width_(input_width), layers_(std::move(layers)) {
    validate();
  }

  std::size_t input_width() const noexcept { return input_width_; }
  std::size_t output_width() const noexcept {
    return layers_.empty() ? 0 : layers_.back().neurons();
  }
  std::size_t layer_count() const noexcept { return layers_.size(); }

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t k) const { return layers_[k]; }
  Layer& layer(std::size_t k) { return layers_[k]; }

  std::size_t parameter_count() const noexcept {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.weights.size() + l.biases.size();
    return n;
  }

  // Shape chain and finiteness; throws if the structure is inconsistent.
  void validate() const {
    if (layers_.empty()) throw ConfigError("network has no layers");
    if (input_width_ == 0) throw ConfigError("network input width is zero");
    std::size_t prev = input_width_;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const Layer& l = layers_[k];
      if (l.neurons() == 0) {
        throw ConfigError("layer " + std::to_string(k) + " has zero neurons");
      }
      if (l.fan_in() != prev) {
        throw ShapeError("layer " + std::to_string(k) + " expects " +
                         std::to_string(l.fan_in()) + " inputs, previous width is " +
                         std::to_string(prev));
      }
      if (l.biases.size() != l.neurons()) {
        throw ShapeError("layer " + std::to_string(k) + " bias length " +
                         std::to_string(l.biases.size()) + " != neuron count " +
                         std::to_string(l.neurons()));
      }
      if (!all_finite(l.weights) || !all_finite(std::span<const double>(l.biases))) {
        throw NumericError("layer " + std::to_string(k) + " contains non-finite parameters");
      }
      prev = l.neurons();
    }
  }

  friend bool operator==(const Network& a, const Network& b) {
    if (a.input_width_ != b.input_width_ || a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t k = 0; k < a.layers_.size(); ++k) {
      if (!(a.layers_[k].weights == b.layers_[k].weights) ||
          a.layers_[k].biases != b.layers_[k].biases ||
          a.layers_[k].transfer != b.layers_[k].transfer) {
        return false;
      }
    }
    return true;
  }

 private:
  std::size_t input_width_ = 0;
  std::vector<Layer> layers_;
};

// Weights drawn uniformly from [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
// layer_sizes[0] is the input width; identical seed gives a bit-identical network.
inline Network init_network(const std::vector<std::size_t>& layer_sizes,
                            const std::vector<TransferKind>& transfers, std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw ConfigError("init_network: need at least input and one layer size");
  }
  if (transfers.size() != layer_sizes.size() - 1) {
    throw ConfigError("init_network: " + std::to_string(layer_sizes.size() - 1) +
                      " layers but " + std::to_string(transfers.size()) + " transfer tags");
  }
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw ConfigError("init_network: zero-size layer");
  }

  Rng rng(seed);
  std::vector<Layer> layers;
  layers.reserve(transfers.size());
  for (std::size_t k = 1; k < layer_sizes.size(); ++k) {
    Layer l;
    const std::size_t fan_in = layer_sizes[k - 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    l.weights = Matrix(layer_sizes[k], fan_in);
    for (double& w : l.weights.data()) w = rng.uniform(-bound, bound);
    l.biases.assign(layer_sizes[k], 0.0);
    l.transfer = transfers[k - 1];
    layers.push_back(std::move(l));
  }
  return Network(layer_sizes[0], std::move(layers));
}

// Everything backprop needs from one batch pass: per-layer pre-activations
// (affine results before the transfer) and activations, activations[0] = input.
struct ForwardTrace {
  std::vector<Matrix> pre_activations;
  std::vector<Matrix> activations;

  const Matrix& output() const { return activations.back(); }
};

// Batch forward pass, one record per row of `input`.
inline ForwardTrace forward_trace(const Network& net, const Matrix& input) {
  if (input.cols() != net.input_width()) {
    throw ShapeError("forward: input width " + std::to_string(input.cols()) +
                     " != network input width " + std::to_string(net.input_width()));
  }
  if (!all_finite(input)) throw DomainError("forward: non-finite input");

  ForwardTrace trace;
  trace.pre_activations.reserve(net.layer_count());
  trace.activations.reserve(net.layer_count() + 1);
  trace.activations.push_back(input);

  const std::size_t p = input.rows();
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    const Layer& l = net.layer(k);
    const Matrix& prev = trace.activations.back();
    Matrix z(p, l.neurons());
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t j = 0; j < l.neurons(); ++j) {
        double acc = l.biases[j];
        for (std::size_t i = 0; i < l.fan_in(); ++i) {
          acc += l.weights(j, i) * prev(r, i);
        }
        z(r, j) = acc;
      }
    }
    Matrix a(p, l.neurons());
    for (std::size_t idx = 0; idx < z.size(); ++idx) {
      const double zi = z.data()[idx];
      if (!std::isfinite(zi)) {
        throw NumericError("forward: non-finite pre-activation in layer " + std::to_string(k));
      }
      a.data()[idx] = transfer_eval(l.transfer, zi);
    }
    trace.pre_activations.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

inline std::vector<double> forward(const Network& net, std::span<const double> input) {
  Matrix in(1, input.size());
  for (std::size_t i = 0; i < input.size(); ++i) in(0, i) = input[i];
  ForwardTrace trace = forward_trace(net, in);
  const Matrix& out = trace.output();
  return {out.data().begin(), out.data().end()};
}

}  // namespace matbridge
