#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fluocnn/rng.hpp"

namespace fluocnn::nn {

/// C channels of equal length L, stored channel-major.
struct FeatureMaps {
  std::size_t channels = 0;
  std::size_t length = 0;
  std::vector<double> values;

  FeatureMaps() = default;
  FeatureMaps(std::size_t channels, std::size_t length, double fill = 0.0);
  static FeatureMaps single(std::span<const double> values);

  void resize(std::size_t channels, std::size_t length);

  std::span<double> channel(std::size_t c) { return {values.data() + c * length, length}; }
  std::span<const double> channel(std::size_t c) const {
    return {values.data() + c * length, length};
  }
  double& at(std::size_t c, std::size_t i) { return values[c * length + i]; }
  double at(std::size_t c, std::size_t i) const { return values[c * length + i]; }
};

/// Valid (unpadded), stride-1 cross-correlation. Filters are stored as
/// [out_channel][in_channel][tap].
struct Conv1DLayer {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kernel = 0;
  std::vector<double> filters;
  std::vector<double> biases;

  Conv1DLayer() = default;
  Conv1DLayer(std::size_t out_channels, std::size_t in_channels, std::size_t kernel);

  double& filter(std::size_t c, std::size_t j, std::size_t k) {
    return filters[(c * in_channels + j) * kernel + k];
  }
  double filter(std::size_t c, std::size_t j, std::size_t k) const {
    return filters[(c * in_channels + j) * kernel + k];
  }
};

/// out[c][i] = bias[c] + sum_j sum_k filters[c][j][k] * in[j][i + k].
///
/// The sum for each output starts at 0.0 and adds terms with the input
/// channel j in the outer loop and the tap k in the inner loop; the bias is
/// added last. This order is part of the contract: a naive double loop in
/// the same order reproduces the result bit for bit.
FeatureMaps conv1d_forward(const FeatureMaps& input, const Conv1DLayer& layer);
void conv1d_forward_into(const FeatureMaps& input, const Conv1DLayer& layer, FeatureMaps& out);

struct Conv1DGradients {
  FeatureMaps input;
  std::vector<double> filters;
  std::vector<double> biases;
};

Conv1DGradients conv1d_backward(const FeatureMaps& grad_out, const FeatureMaps& input,
                                const Conv1DLayer& layer);

/// Adds this sample's gradients into the given buffers. `grad_input` may be
/// null when the input gradient is not needed (the first layer). Zero
/// entries of `grad_out` are skipped, which is most of them after pooling.
void conv1d_backward_accumulate(const FeatureMaps& grad_out, const FeatureMaps& input,
                                const Conv1DLayer& layer, std::span<double> grad_filters,
                                std::span<double> grad_biases, FeatureMaps* grad_input);

struct MaxPoolResult {
  FeatureMaps output;
  /// argmax[c * out_length + o] is the winning input position within channel c.
  std::vector<std::size_t> argmax;
};

/// Non-overlapping windows of `pool`; a trailing partial window is dropped.
/// Ties resolve to the first position.
MaxPoolResult maxpool_forward(const FeatureMaps& input, std::size_t pool);
void maxpool_forward_into(const FeatureMaps& input, std::size_t pool, FeatureMaps& out,
                          std::vector<std::size_t>& argmax);

FeatureMaps maxpool_backward(const FeatureMaps& grad_out, std::span<const std::size_t> argmax,
                             std::size_t input_length);
void maxpool_backward_into(const FeatureMaps& grad_out, std::span<const std::size_t> argmax,
                           std::size_t input_length, FeatureMaps& grad_input);

enum class Activation { relu, identity };

/// weights is row-major [output][input].
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> biases;
  Activation activation = Activation::relu;

  DenseLayer() = default;
  DenseLayer(std::size_t inputs, std::size_t outputs, Activation activation);

  double& weight(std::size_t o, std::size_t i) { return weights[o * inputs + i]; }
  double weight(std::size_t o, std::size_t i) const { return weights[o * inputs + i]; }
};

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer);
void dense_forward_into(std::span<const double> input, const DenseLayer& layer,
                        std::span<double> out);

struct DenseGradients {
  std::vector<double> input;
  std::vector<double> weights;
  std::vector<double> biases;
};

/// `grad_out` is the gradient with respect to the activated output and
/// `output` the activated output of the forward pass. relu'(0) is 0.
DenseGradients dense_backward(std::span<const double> grad_out, std::span<const double> input,
                              std::span<const double> output, const DenseLayer& layer);
void dense_backward_accumulate(std::span<const double> grad_out, std::span<const double> input,
                               std::span<const double> output, const DenseLayer& layer,
                               std::span<double> grad_weights, std::span<double> grad_biases,
                               std::span<double> grad_input);

enum class Mode { train, eval };

struct DropoutResult {
  std::vector<double> output;
  /// Per-element multiplier: 0 for dropped, 1/(1-rate) for kept (1 in eval).
  std::vector<double> mask;
};

/// Inverted dropout. Eval mode (or rate 0) is the identity.
DropoutResult dropout_apply(std::span<const double> input, double rate, Mode mode, Rng& rng);
void dropout_mask_into(double rate, Mode mode, Rng& rng, std::span<double> mask);

void relu_inplace(std::span<double> values);

}  // namespace fluocnn::nn
