#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fluocnn/nn/layers.hpp"
#include "fluocnn/rng.hpp"

namespace fluocnn::nn {

struct HyperParams {
  std::size_t filters1 = 6;
  std::size_t filters2 = 4;
  std::size_t ksize1 = 40;
  std::size_t ksize2 = 20;
  std::size_t pool = 8;
  double dropout = 0.5;
  std::size_t epochs = 500;
  std::size_t batch = 64;
  double learning_rate = 1e-3;
  std::size_t dense1 = 16;
  std::size_t dense2 = 8;

  /// Throws Error(domain) unless every count is positive and dropout is in [0, 1).
  void validate() const;
  std::string describe() const;
};

/// Output length of every stage for one input length.
struct ShapeTrace {
  std::size_t input = 0;
  std::size_t conv1 = 0;
  std::size_t pool = 0;
  std::size_t conv2 = 0;
  std::size_t flatten = 0;
  std::size_t dense1 = 0;
  std::size_t dense2 = 0;
  std::size_t output = 1;
};

/// Conv(filters1, ksize1) -> MaxPool(pool) -> Conv(filters2, ksize2) ->
/// Flatten -> Dense(dense1) -> Dense(dense2) -> Dense(1). Throws
/// ArchitectureError naming the first stage whose length would drop below 1.
ShapeTrace shape_trace(const HyperParams& hp, std::size_t input_length);

/// Number of trainable weights and biases.
std::size_t parameter_count(const HyperParams& hp, std::size_t input_length);

inline constexpr std::size_t kParameterBlocks = 10;

/// Parameter block order, shared by the optimizer and the checkpoint file.
enum class Block : std::size_t {
  conv1_filters, conv1_biases, conv2_filters, conv2_biases,
  dense1_weights, dense1_biases, dense2_weights, dense2_biases,
  output_weights, output_biases,
};

/// The 1D-CNN regressor. Conv and hidden dense layers use relu; dropout
/// follows each hidden dense layer; the single output neuron is linear.
class Network {
 public:
  /// He-uniform initialisation for relu layers, Glorot-uniform for the
  /// output neuron, zero biases. Draws from `rng` only.
  static Network build(const HyperParams& hp, std::size_t input_length, Rng& rng);

  /// Zero-initialised network with the right shapes (used when loading).
  static Network zeros(const HyperParams& hp, std::size_t input_length);

  const HyperParams& hyper_params() const noexcept { return hp_; }
  std::size_t input_length() const noexcept { return shapes_.input; }
  const ShapeTrace& shapes() const noexcept { return shapes_; }

  std::array<std::span<double>, kParameterBlocks> parameter_blocks();
  std::array<std::span<const double>, kParameterBlocks> parameter_blocks() const;
  std::size_t parameter_count() const;

  Conv1DLayer conv1;
  Conv1DLayer conv2;
  DenseLayer dense1;
  DenseLayer dense2;
  DenseLayer output;
  /// Source of dropout masks in train mode.
  Rng dropout_rng;

 private:
  HyperParams hp_;
  ShapeTrace shapes_;
};

/// Intermediate activations of one forward pass plus backward scratch space.
struct ForwardCache {
  FeatureMaps input;
  FeatureMaps conv1;  // after relu
  FeatureMaps pooled;
  std::vector<std::size_t> argmax;
  FeatureMaps conv2;  // after relu; flattened channel-major into dense1
  std::vector<double> dense1;
  std::vector<double> mask1;
  std::vector<double> dropped1;
  std::vector<double> dense2;
  std::vector<double> mask2;
  std::vector<double> dropped2;
  double prediction = 0.0;

  FeatureMaps grad_conv2;
  FeatureMaps grad_pooled;
  FeatureMaps grad_conv1;
  std::vector<double> grad_flat;
  std::vector<double> grad_dense1;
  std::vector<double> grad_dense2;
};

struct NetworkGradients {
  std::array<std::vector<double>, kParameterBlocks> blocks;

  explicit NetworkGradients(const Network& net);
  void zero();
};

/// Eval-mode prediction; pure and safe to call concurrently.
double forward(const Network& net, std::span<const double> spectrum);

/// Prediction in the given mode; train mode draws dropout masks from
/// `net.dropout_rng`.
double forward(Network& net, std::span<const double> spectrum, Mode mode);

/// As above, keeping every activation for backward().
double forward(Network& net, std::span<const double> spectrum, Mode mode, ForwardCache& cache);
double forward_eval(const Network& net, std::span<const double> spectrum, ForwardCache& cache);

/// Adds d(loss)/d(parameters) for the cached sample into `grads`, given
/// d(loss)/d(prediction).
void backward(const Network& net, ForwardCache& cache, double dloss_dprediction,
              NetworkGradients& grads);

}  // namespace fluocnn::nn
