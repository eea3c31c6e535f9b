#pragma once

#include <span>
#include <vector>

namespace fluocnn::nn {

struct LossResult {
  double value = 0.0;
  /// d(loss)/d(prediction_i) = 2 (pred_i - target_i) / N
  std::vector<double> gradient;
};

/// Mean squared error. Throws Error(empty_batch) / Error(dimension).
LossResult mse_loss(std::span<const double> prediction, std::span<const double> target);

}  // namespace fluocnn::nn
