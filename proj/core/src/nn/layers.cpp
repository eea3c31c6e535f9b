#include "fluocnn/nn/layers.hpp"

#include <algorithm>
#include <cstring>
#include <random>
#include <string>

#include "fluocnn/error.hpp"

namespace fluocnn::nn {

namespace {

std::string dims(std::size_t c, std::size_t l) {
  return std::to_string(c) + "x" + std::to_string(l);
}

}  // namespace

FeatureMaps::FeatureMaps(std::size_t channels, std::size_t length, double fill)
    : channels(channels), length(length), values(channels * length, fill) {}

FeatureMaps FeatureMaps::single(std::span<const double> v) {
  FeatureMaps m(1, v.size());
  std::copy(v.begin(), v.end(), m.values.begin());
  return m;
}

void FeatureMaps::resize(std::size_t c, std::size_t l) {
  channels = c;
  length = l;
  values.resize(c * l);
}

Conv1DLayer::Conv1DLayer(std::size_t out_channels, std::size_t in_channels, std::size_t kernel)
    : out_channels(out_channels),
      in_channels(in_channels),
      kernel(kernel),
      filters(out_channels * in_channels * kernel, 0.0),
      biases(out_channels, 0.0) {
  if (kernel < 1 || out_channels < 1 || in_channels < 1) {
    throw Error(ErrorKind::shape, "convolution needs at least one filter, channel and tap");
  }
}

namespace {

// Four doubles handled as one unit; lowers to AVX or paired SSE2 ops.
typedef double Vec4 __attribute__((vector_size(32)));

inline Vec4 broadcast(double v) { return Vec4{v, v, v, v}; }

inline Vec4 load4(const double* p) {
  Vec4 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store4(double* p, Vec4 v) { std::memcpy(p, &v, sizeof v); }

}  // namespace

void conv1d_forward_into(const FeatureMaps& input, const Conv1DLayer& layer, FeatureMaps& out) {
  if (input.channels != layer.in_channels) {
    throw Error(ErrorKind::shape, "conv1d: input has " + std::to_string(input.channels) +
                                      " channels, layer expects " +
                                      std::to_string(layer.in_channels));
  }
  if (input.length < layer.kernel) {
    throw Error(ErrorKind::shape, "conv1d: input length " + std::to_string(input.length) +
                                      " is shorter than the filter size " +
                                      std::to_string(layer.kernel));
  }
  const std::size_t K = layer.kernel;
  const std::size_t L_out = input.length - K + 1;
  out.resize(layer.out_channels, L_out);
  // Outputs are computed in register blocks of kBlock positions. Each o[i]
  // still receives its terms in (j, k) order with the bias last, so this
  // matches the naive per-output loop bit for bit.
  constexpr std::size_t kLanes = 4;
  constexpr std::size_t kVecs = 6;
  constexpr std::size_t kBlock = kLanes * kVecs;
  const std::size_t J = layer.in_channels;
  for (std::size_t c = 0; c < layer.out_channels; ++c) {
    double* o = out.values.data() + c * L_out;
    const double* wc = layer.filters.data() + c * J * K;
    const double b = layer.biases[c];
    std::size_t i0 = 0;
    for (; i0 + kBlock <= L_out; i0 += kBlock) {
      Vec4 acc[kVecs] = {};
      for (std::size_t j = 0; j < J; ++j) {
        const double* x = input.values.data() + j * input.length + i0;
        const double* w = wc + j * K;
        for (std::size_t k = 0; k < K; ++k) {
          const Vec4 wk = broadcast(w[k]);
          for (std::size_t v = 0; v < kVecs; ++v) acc[v] += wk * load4(x + k + v * kLanes);
        }
      }
      const Vec4 bv = broadcast(b);
      for (std::size_t v = 0; v < kVecs; ++v) store4(o + i0 + v * kLanes, acc[v] + bv);
    }
    for (std::size_t i = i0; i < L_out; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        const double* x = input.values.data() + j * input.length + i;
        const double* w = wc + j * K;
        for (std::size_t k = 0; k < K; ++k) acc += w[k] * x[k];
      }
      o[i] = acc + b;
    }
  }
}

FeatureMaps conv1d_forward(const FeatureMaps& input, const Conv1DLayer& layer) {
  FeatureMaps out;
  conv1d_forward_into(input, layer, out);
  return out;
}

void conv1d_backward_accumulate(const FeatureMaps& grad_out, const FeatureMaps& input,
                                const Conv1DLayer& layer, std::span<double> grad_filters,
                                std::span<double> grad_biases, FeatureMaps* grad_input) {
  const std::size_t K = layer.kernel;
  if (input.channels != layer.in_channels || input.length < K ||
      grad_out.channels != layer.out_channels || grad_out.length != input.length - K + 1 ||
      grad_filters.size() != layer.filters.size() || grad_biases.size() != layer.biases.size()) {
    throw Error(ErrorKind::shape, "conv1d_backward: grad " + dims(grad_out.channels, grad_out.length) +
                                      " does not match input " +
                                      dims(input.channels, input.length) + " and kernel " +
                                      std::to_string(K));
  }
  if (grad_input != nullptr && (grad_input->channels != input.channels ||
                                grad_input->length != input.length)) {
    throw Error(ErrorKind::shape, "conv1d_backward: grad_input has the wrong shape");
  }
  const std::size_t L_out = grad_out.length;
  for (std::size_t c = 0; c < layer.out_channels; ++c) {
    const double* g = grad_out.values.data() + c * L_out;
    double gb = 0.0;
    for (std::size_t i = 0; i < L_out; ++i) gb += g[i];
    grad_biases[c] += gb;

    for (std::size_t i = 0; i < L_out; ++i) {
      const double gi = g[i];
      if (gi == 0.0) continue;
      for (std::size_t j = 0; j < layer.in_channels; ++j) {
        const double* x = input.values.data() + j * input.length + i;
        double* gw = grad_filters.data() + (c * layer.in_channels + j) * K;
        for (std::size_t k = 0; k < K; ++k) gw[k] += gi * x[k];
        if (grad_input != nullptr) {
          const double* w = layer.filters.data() + (c * layer.in_channels + j) * K;
          double* gx = grad_input->values.data() + j * input.length + i;
          for (std::size_t k = 0; k < K; ++k) gx[k] += gi * w[k];
        }
      }
    }
  }
}

Conv1DGradients conv1d_backward(const FeatureMaps& grad_out, const FeatureMaps& input,
                                const Conv1DLayer& layer) {
  Conv1DGradients g;
  g.input = FeatureMaps(input.channels, input.length);
  g.filters.assign(layer.filters.size(), 0.0);
  g.biases.assign(layer.biases.size(), 0.0);
  conv1d_backward_accumulate(grad_out, input, layer, g.filters, g.biases, &g.input);
  return g;
}

void maxpool_forward_into(const FeatureMaps& input, std::size_t pool, FeatureMaps& out,
                          std::vector<std::size_t>& argmax) {
  if (pool < 1) throw Error(ErrorKind::shape, "maxpool: pool size must be >= 1");
  if (pool > input.length) {
    throw Error(ErrorKind::shape, "maxpool: pool size " + std::to_string(pool) +
                                      " exceeds input length " + std::to_string(input.length));
  }
  const std::size_t L_out = input.length / pool;
  out.resize(input.channels, L_out);
  argmax.resize(input.channels * L_out);
  for (std::size_t c = 0; c < input.channels; ++c) {
    const double* x = input.values.data() + c * input.length;
    for (std::size_t o = 0; o < L_out; ++o) {
      std::size_t best = o * pool;
      for (std::size_t p = best + 1; p < (o + 1) * pool; ++p) {
        if (x[p] > x[best]) best = p;
      }
      out.values[c * L_out + o] = x[best];
      argmax[c * L_out + o] = best;
    }
  }
}

MaxPoolResult maxpool_forward(const FeatureMaps& input, std::size_t pool) {
  MaxPoolResult r;
  maxpool_forward_into(input, pool, r.output, r.argmax);
  return r;
}

void maxpool_backward_into(const FeatureMaps& grad_out, std::span<const std::size_t> argmax,
                           std::size_t input_length, FeatureMaps& grad_input) {
  if (argmax.size() != grad_out.values.size()) {
    throw Error(ErrorKind::internal_consistency,
                "maxpool_backward: " + std::to_string(argmax.size()) + " indices for " +
                    std::to_string(grad_out.values.size()) + " gradients");
  }
  grad_input.resize(grad_out.channels, input_length);
  std::fill(grad_input.values.begin(), grad_input.values.end(), 0.0);
  for (std::size_t c = 0; c < grad_out.channels; ++c) {
    for (std::size_t o = 0; o < grad_out.length; ++o) {
      const std::size_t idx = argmax[c * grad_out.length + o];
      if (idx >= input_length) {
        throw Error(ErrorKind::internal_consistency,
                    "maxpool_backward: index " + std::to_string(idx) + " outside input of length " +
                        std::to_string(input_length));
      }
      grad_input.values[c * input_length + idx] += grad_out.values[c * grad_out.length + o];
    }
  }
}

FeatureMaps maxpool_backward(const FeatureMaps& grad_out, std::span<const std::size_t> argmax,
                             std::size_t input_length) {
  FeatureMaps g;
  maxpool_backward_into(grad_out, argmax, input_length, g);
  return g;
}

DenseLayer::DenseLayer(std::size_t inputs, std::size_t outputs, Activation activation)
    : inputs(inputs),
      outputs(outputs),
      weights(inputs * outputs, 0.0),
      biases(outputs, 0.0),
      activation(activation) {
  if (inputs < 1 || outputs < 1) throw Error(ErrorKind::shape, "dense layer needs >= 1 unit");
}

void dense_forward_into(std::span<const double> input, const DenseLayer& layer,
                        std::span<double> out) {
  if (input.size() != layer.inputs || out.size() != layer.outputs) {
    throw Error(ErrorKind::shape, "dense: input has " + std::to_string(input.size()) +
                                      " values, layer expects " + std::to_string(layer.inputs));
  }
  for (std::size_t o = 0; o < layer.outputs; ++o) {
    const double* w = layer.weights.data() + o * layer.inputs;
    double acc = 0.0;
    for (std::size_t i = 0; i < layer.inputs; ++i) acc += w[i] * input[i];
    acc += layer.biases[o];
    out[o] = (layer.activation == Activation::relu && acc < 0.0) ? 0.0 : acc;
  }
}

std::vector<double> dense_forward(std::span<const double> input, const DenseLayer& layer) {
  std::vector<double> out(layer.outputs);
  dense_forward_into(input, layer, out);
  return out;
}

void dense_backward_accumulate(std::span<const double> grad_out, std::span<const double> input,
                               std::span<const double> output, const DenseLayer& layer,
                               std::span<double> grad_weights, std::span<double> grad_biases,
                               std::span<double> grad_input) {
  if (grad_out.size() != layer.outputs || output.size() != layer.outputs ||
      input.size() != layer.inputs || grad_weights.size() != layer.weights.size() ||
      grad_biases.size() != layer.biases.size() ||
      (!grad_input.empty() && grad_input.size() != layer.inputs)) {
    throw Error(ErrorKind::shape, "dense_backward: dimension mismatch");
  }
  for (std::size_t o = 0; o < layer.outputs; ++o) {
    double g = grad_out[o];
    if (layer.activation == Activation::relu && !(output[o] > 0.0)) g = 0.0;
    if (g == 0.0) continue;
    grad_biases[o] += g;
    double* gw = grad_weights.data() + o * layer.inputs;
    for (std::size_t i = 0; i < layer.inputs; ++i) gw[i] += g * input[i];
    if (!grad_input.empty()) {
      const double* w = layer.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) grad_input[i] += g * w[i];
    }
  }
}

DenseGradients dense_backward(std::span<const double> grad_out, std::span<const double> input,
                              std::span<const double> output, const DenseLayer& layer) {
  DenseGradients g;
  g.input.assign(layer.inputs, 0.0);
  g.weights.assign(layer.weights.size(), 0.0);
  g.biases.assign(layer.biases.size(), 0.0);
  dense_backward_accumulate(grad_out, input, output, layer, g.weights, g.biases, g.input);
  return g;
}

void dropout_mask_into(double rate, Mode mode, Rng& rng, std::span<double> mask) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw Error(ErrorKind::domain, "dropout rate must be in [0, 1)");
  }
  if (mode == Mode::eval || rate == 0.0) {
    std::fill(mask.begin(), mask.end(), 1.0);
    return;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& m : mask) m = (u(rng) < rate) ? 0.0 : keep_scale;
}

DropoutResult dropout_apply(std::span<const double> input, double rate, Mode mode, Rng& rng) {
  DropoutResult r;
  r.mask.resize(input.size());
  dropout_mask_into(rate, mode, rng, r.mask);
  r.output.resize(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    r.output[i] = input[i] * r.mask[i];
  }
  return r;
}

void relu_inplace(std::span<double> values) {
  for (double& v : values) v = v < 0.0 ? 0.0 : v;
}

}  // namespace fluocnn::nn
