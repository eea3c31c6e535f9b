#include "fluocnn/eval/metrics.hpp"

#include <cmath>
#include <string>

#include "fluocnn/error.hpp"

namespace fluocnn::eval {

namespace {

void check_batch(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size()) {
    throw Error(ErrorKind::dimension, std::to_string(prediction.size()) +
                                          " predictions for " + std::to_string(target.size()) +
                                          " targets");
  }
  if (prediction.empty()) throw Error(ErrorKind::empty_batch, "metric of an empty batch");
}

}  // namespace

double mae(std::span<const double> prediction, std::span<const double> target) {
  check_batch(prediction, target);
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) sum += std::abs(prediction[i] - target[i]);
  return sum / static_cast<double>(prediction.size());
}

double mse(std::span<const double> prediction, std::span<const double> target) {
  check_batch(prediction, target);
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = prediction[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(prediction.size());
}

MeanSd mean_and_sample_sd(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::empty_batch, "statistics of an empty list");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  MeanSd r;
  r.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.variance = ss / (n - 1.0);
    r.sd = std::sqrt(r.variance);
  }
  return r;
}

}  // namespace fluocnn::eval
