#pragma once

#include <span>

namespace fluocnn::eval {

/// Mean absolute error. Throws Error(empty_batch) / Error(dimension).
double mae(std::span<const double> prediction, std::span<const double> target);

/// Mean squared error (same contract as mae).
double mse(std::span<const double> prediction, std::span<const double> target);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;        // sample (n-1) form; 0 for a single value
  double variance = 0.0;  // sd * sd
};

MeanSd mean_and_sample_sd(std::span<const double> values);

}  // namespace fluocnn::eval
