#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace fluocnn::stats {

inline constexpr double kDefaultAlpha = 0.05;

/// Verdict of the equal-size two-sample t-test on per-fold MAE lists.
struct TTestReport {
  double mean1 = 0.0;
  double mean2 = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  std::size_t n_oil = 0;
  double s_p = 0.0;
  double t_value = 0.0;
  std::size_t dof = 0;
  double alpha = kDefaultAlpha;
  double t_critical = 0.0;
  bool two_sided = false;
  bool reject_equal_means = false;

  std::string to_json() const;
};

/// S_P = sqrt((n-1) var1 / (2n-2) + (n-1) var2 / (2n-2)).
/// Throws Error(insufficient_samples) for n_oil < 2, Error(domain) for a
/// negative variance.
double pooled_sd(double var1, double var2, std::size_t n_oil);

/// T = (mean1 - mean2) / (S_P sqrt(2 / n_oil)). With S_P = 0, equal means
/// give 0 and unequal means throw Error(degenerate_variance).
double t_statistic(double mean1, double mean2, double s_p, std::size_t n_oil);

/// Means, sample variances, S_P, T and the critical value for 2n-2 degrees
/// of freedom. One-sided by default: reject iff T > t_alpha. The two-sided
/// form rejects iff |T| > t_{alpha/2}.
TTestReport compare_configs(std::span<const double> mae_1, std::span<const double> mae_2,
                            double alpha = kDefaultAlpha, bool two_sided = false);

}  // namespace fluocnn::stats
