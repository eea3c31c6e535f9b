#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fluocnn/nn/network.hpp"

namespace fluocnn::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias-corrected moments, one moment pair per parameter.
class Adam {
 public:
  Adam(const Network& net, AdamConfig config);

  void step(Network& net, const NetworkGradients& grads);
  std::size_t steps() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  AdamConfig config_;
  std::array<std::vector<double>, kParameterBlocks> m_;
  std::array<std::vector<double>, kParameterBlocks> v_;
  std::size_t t_ = 0;
};

}  // namespace fluocnn::nn
