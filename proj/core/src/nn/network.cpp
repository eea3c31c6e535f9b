#include "fluocnn/nn/network.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fluocnn/error.hpp"

namespace fluocnn::nn {

namespace {

void fill_uniform(std::vector<double>& v, double limit, Rng& rng) {
  std::uniform_real_distribution<double> u(-limit, limit);
  for (double& x : v) x = u(rng);
}

double he_limit(std::size_t fan_in) { return std::sqrt(6.0 / static_cast<double>(fan_in)); }

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void run_forward(const Network& net, std::span<const double> spectrum, Mode mode, Rng* rng,
                 ForwardCache& cache) {
  if (spectrum.size() != net.input_length()) {
    throw Error(ErrorKind::shape, "network expects " + std::to_string(net.input_length()) +
                                      " pixels, got " + std::to_string(spectrum.size()));
  }
  const auto& hp = net.hyper_params();
  cache.input.resize(1, spectrum.size());
  std::copy(spectrum.begin(), spectrum.end(), cache.input.values.begin());

  conv1d_forward_into(cache.input, net.conv1, cache.conv1);
  relu_inplace(cache.conv1.values);
  maxpool_forward_into(cache.conv1, hp.pool, cache.pooled, cache.argmax);
  conv1d_forward_into(cache.pooled, net.conv2, cache.conv2);
  relu_inplace(cache.conv2.values);

  cache.dense1.resize(net.dense1.outputs);
  cache.mask1.resize(net.dense1.outputs);
  cache.dropped1.resize(net.dense1.outputs);
  dense_forward_into(cache.conv2.values, net.dense1, cache.dense1);

  cache.dense2.resize(net.dense2.outputs);
  cache.mask2.resize(net.dense2.outputs);
  cache.dropped2.resize(net.dense2.outputs);

  const bool drop = mode == Mode::train && hp.dropout > 0.0;
  if (drop) {
    dropout_mask_into(hp.dropout, mode, *rng, cache.mask1);
  } else {
    std::fill(cache.mask1.begin(), cache.mask1.end(), 1.0);
  }
  for (std::size_t i = 0; i < cache.dense1.size(); ++i) {
    cache.dropped1[i] = cache.dense1[i] * cache.mask1[i];
  }
  dense_forward_into(cache.dropped1, net.dense2, cache.dense2);

  if (drop) {
    dropout_mask_into(hp.dropout, mode, *rng, cache.mask2);
  } else {
    std::fill(cache.mask2.begin(), cache.mask2.end(), 1.0);
  }
  for (std::size_t i = 0; i < cache.dense2.size(); ++i) {
    cache.dropped2[i] = cache.dense2[i] * cache.mask2[i];
  }
  double out = 0.0;
  dense_forward_into(cache.dropped2, net.output, std::span<double>(&out, 1));
  cache.prediction = out;
}

}  // namespace

void HyperParams::validate() const {
  if (filters1 < 1 || filters2 < 1 || ksize1 < 1 || ksize2 < 1 || pool < 1 || batch < 1 ||
      dense1 < 1 || dense2 < 1) {
    throw Error(ErrorKind::domain, "hyperparameter counts must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorKind::domain, "dropout must be in [0, 1)");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::domain, "learning rate must be finite and >= 0");
  }
}

std::string HyperParams::describe() const {
  std::ostringstream os;
  os << "conv " << filters1 << "x" << ksize1 << " -> pool " << pool << " -> conv " << filters2
     << "x" << ksize2 << " -> dense " << dense1 << " -> dense " << dense2 << " -> 1"
     << " (dropout " << dropout << ", batch " << batch << ", epochs " << epochs << ", lr "
     << learning_rate << ")";
  return os.str();
}

ShapeTrace shape_trace(const HyperParams& hp, std::size_t input_length) {
  hp.validate();
  ShapeTrace t;
  t.input = input_length;
  if (input_length < hp.ksize1) {
    throw ArchitectureError("conv1", "filter size " + std::to_string(hp.ksize1) +
                                         " exceeds input length " + std::to_string(input_length));
  }
  t.conv1 = input_length - hp.ksize1 + 1;
  t.pool = t.conv1 / hp.pool;
  if (t.pool < 1) {
    throw ArchitectureError("pool", "pool size " + std::to_string(hp.pool) +
                                        " leaves no output from conv1 length " +
                                        std::to_string(t.conv1));
  }
  if (t.pool < hp.ksize2) {
    throw ArchitectureError("conv2", "filter size " + std::to_string(hp.ksize2) +
                                         " exceeds pooled length " + std::to_string(t.pool));
  }
  t.conv2 = t.pool - hp.ksize2 + 1;
  t.flatten = hp.filters2 * t.conv2;
  t.dense1 = hp.dense1;
  t.dense2 = hp.dense2;
  t.output = 1;
  return t;
}

std::size_t parameter_count(const HyperParams& hp, std::size_t input_length) {
  const auto t = shape_trace(hp, input_length);
  return hp.filters1 * hp.ksize1 + hp.filters1 +                 // conv1
         hp.filters2 * hp.filters1 * hp.ksize2 + hp.filters2 +   // conv2
         t.flatten * hp.dense1 + hp.dense1 +                     // dense1
         hp.dense1 * hp.dense2 + hp.dense2 +                     // dense2
         hp.dense2 + 1;                                          // output
}

Network Network::zeros(const HyperParams& hp, std::size_t input_length) {
  Network net;
  net.shapes_ = shape_trace(hp, input_length);
  net.hp_ = hp;
  net.conv1 = Conv1DLayer(hp.filters1, 1, hp.ksize1);
  net.conv2 = Conv1DLayer(hp.filters2, hp.filters1, hp.ksize2);
  net.dense1 = DenseLayer(net.shapes_.flatten, hp.dense1, Activation::relu);
  net.dense2 = DenseLayer(hp.dense1, hp.dense2, Activation::relu);
  net.output = DenseLayer(hp.dense2, 1, Activation::identity);
  return net;
}

Network Network::build(const HyperParams& hp, std::size_t input_length, Rng& rng) {
  Network net = zeros(hp, input_length);
  fill_uniform(net.conv1.filters, he_limit(hp.ksize1), rng);
  fill_uniform(net.conv2.filters, he_limit(hp.filters1 * hp.ksize2), rng);
  fill_uniform(net.dense1.weights, he_limit(net.dense1.inputs), rng);
  fill_uniform(net.dense2.weights, he_limit(net.dense2.inputs), rng);
  fill_uniform(net.output.weights, glorot_limit(net.output.inputs, 1), rng);
  net.dropout_rng.seed(rng());
  return net;
}

std::array<std::span<double>, kParameterBlocks> Network::parameter_blocks() {
  return {conv1.filters, conv1.biases, conv2.filters, conv2.biases, dense1.weights,
          dense1.biases, dense2.weights, dense2.biases, output.weights, output.biases};
}

std::array<std::span<const double>, kParameterBlocks> Network::parameter_blocks() const {
  return {conv1.filters, conv1.biases, conv2.filters, conv2.biases, dense1.weights,
          dense1.biases, dense2.weights, dense2.biases, output.weights, output.biases};
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (auto b : parameter_blocks()) n += b.size();
  return n;
}

NetworkGradients::NetworkGradients(const Network& net) {
  const auto src = net.parameter_blocks();
  for (std::size_t i = 0; i < kParameterBlocks; ++i) blocks[i].assign(src[i].size(), 0.0);
}

void NetworkGradients::zero() {
  for (auto& b : blocks) std::fill(b.begin(), b.end(), 0.0);
}

double forward_eval(const Network& net, std::span<const double> spectrum, ForwardCache& cache) {
  run_forward(net, spectrum, Mode::eval, nullptr, cache);
  return cache.prediction;
}

double forward(const Network& net, std::span<const double> spectrum) {
  ForwardCache cache;
  return forward_eval(net, spectrum, cache);
}

double forward(Network& net, std::span<const double> spectrum, Mode mode, ForwardCache& cache) {
  run_forward(net, spectrum, mode, &net.dropout_rng, cache);
  return cache.prediction;
}

double forward(Network& net, std::span<const double> spectrum, Mode mode) {
  ForwardCache cache;
  return forward(net, spectrum, mode, cache);
}

void backward(const Network& net, ForwardCache& c, double dloss_dprediction,
              NetworkGradients& grads) {
  auto& g = grads.blocks;
  auto at = [&](Block b) -> std::vector<double>& { return g[static_cast<std::size_t>(b)]; };

  // Output neuron.
  c.grad_dense2.assign(net.dense2.outputs, 0.0);
  const double gout = dloss_dprediction;
  const double out_value = c.prediction;
  dense_backward_accumulate(std::span<const double>(&gout, 1), c.dropped2,
                            std::span<const double>(&out_value, 1), net.output,
                            at(Block::output_weights), at(Block::output_biases), c.grad_dense2);
  for (std::size_t i = 0; i < c.grad_dense2.size(); ++i) c.grad_dense2[i] *= c.mask2[i];

  c.grad_dense1.assign(net.dense1.outputs, 0.0);
  dense_backward_accumulate(c.grad_dense2, c.dropped1, c.dense2, net.dense2,
                            at(Block::dense2_weights), at(Block::dense2_biases), c.grad_dense1);
  for (std::size_t i = 0; i < c.grad_dense1.size(); ++i) c.grad_dense1[i] *= c.mask1[i];

  c.grad_flat.assign(net.dense1.inputs, 0.0);
  dense_backward_accumulate(c.grad_dense1, c.conv2.values, c.dense1, net.dense1,
                            at(Block::dense1_weights), at(Block::dense1_biases), c.grad_flat);

  // Through the conv2 relu.
  c.grad_conv2.resize(c.conv2.channels, c.conv2.length);
  for (std::size_t i = 0; i < c.grad_flat.size(); ++i) {
    c.grad_conv2.values[i] = c.conv2.values[i] > 0.0 ? c.grad_flat[i] : 0.0;
  }
  c.grad_pooled.resize(c.pooled.channels, c.pooled.length);
  std::fill(c.grad_pooled.values.begin(), c.grad_pooled.values.end(), 0.0);
  conv1d_backward_accumulate(c.grad_conv2, c.pooled, net.conv2, at(Block::conv2_filters),
                             at(Block::conv2_biases), &c.grad_pooled);

  maxpool_backward_into(c.grad_pooled, c.argmax, c.conv1.length, c.grad_conv1);
  for (std::size_t i = 0; i < c.grad_conv1.values.size(); ++i) {
    if (!(c.conv1.values[i] > 0.0)) c.grad_conv1.values[i] = 0.0;
  }
  conv1d_backward_accumulate(c.grad_conv1, c.input, net.conv1, at(Block::conv1_filters),
                             at(Block::conv1_biases), nullptr);
}

}  // namespace fluocnn::nn
