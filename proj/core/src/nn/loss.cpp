#include "fluocnn/nn/loss.hpp"

#include <string>

#include "fluocnn/error.hpp"

namespace fluocnn::nn {

LossResult mse_loss(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) {
    throw Error(ErrorKind::dimension, "mse: " + std::to_string(prediction.size()) +
                                          " predictions for " + std::to_string(target.size()) +
                                          " targets");
  }
  if (prediction.empty()) throw Error(ErrorKind::empty_batch, "mse of an empty batch");
  const auto n = static_cast<double>(prediction.size());
  LossResult r;
  r.gradient.resize(prediction.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = prediction[i] - target[i];
    sum += d * d;
    r.gradient[i] = 2.0 * d / n;
  }
  r.value = sum / n;
  return r;
}

}  // namespace fluocnn::nn
