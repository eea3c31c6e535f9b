#include "fluocnn/nn/adam.hpp"

#include <cmath>

#include "fluocnn/error.hpp"

namespace fluocnn::nn {

Adam::Adam(const Network& net, AdamConfig config) : config_(config) {
  const auto blocks = net.parameter_blocks();
  for (std::size_t b = 0; b < kParameterBlocks; ++b) {
    m_[b].assign(blocks[b].size(), 0.0);
    v_[b].assign(blocks[b].size(), 0.0);
  }
}

void Adam::step(Network& net, const NetworkGradients& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  auto blocks = net.parameter_blocks();
  for (std::size_t b = 0; b < kParameterBlocks; ++b) {
    auto params = blocks[b];
    const auto& g = grads.blocks[b];
    if (g.size() != params.size()) {
      throw Error(ErrorKind::internal_consistency, "gradient block size mismatch");
    }
    auto& m = m_[b];
    auto& v = v_[b];
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      params[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace fluocnn::nn
