#include "fluocnn/stats/t_test.hpp"

#include <cmath>
#include <json.hpp>

#include "fluocnn/error.hpp"
#include "fluocnn/eval/metrics.hpp"
#include "fluocnn/stats/t_distribution.hpp"

namespace fluocnn::stats {

double pooled_sd(double var1, double var2, std::size_t n_oil) {
  if (n_oil < 2) throw Error(ErrorKind::insufficient_samples, "pooled deviation needs n_oil >= 2");
  if (!(var1 >= 0.0) || !(var2 >= 0.0)) throw Error(ErrorKind::domain, "variances must be >= 0");
  const double n = static_cast<double>(n_oil);
  const double dof = 2.0 * n - 2.0;
  return std::sqrt((n - 1.0) * var1 / dof + (n - 1.0) * var2 / dof);
}

double t_statistic(double mean1, double mean2, double s_p, std::size_t n_oil) {
  if (n_oil < 1) throw Error(ErrorKind::insufficient_samples, "t statistic needs n_oil >= 1");
  if (!(s_p >= 0.0)) throw Error(ErrorKind::domain, "pooled deviation must be >= 0");
  if (s_p == 0.0) {
    if (mean1 == mean2) return 0.0;
    throw Error(ErrorKind::degenerate_variance,
                "both MAE lists have zero variance but different means");
  }
  return (mean1 - mean2) / (s_p * std::sqrt(2.0 / static_cast<double>(n_oil)));
}

TTestReport compare_configs(std::span<const double> mae_1, std::span<const double> mae_2,
                            double alpha, bool two_sided) {
  if (mae_1.size() != mae_2.size()) {
    throw Error(ErrorKind::dimension, "MAE lists have different lengths (" +
                                          std::to_string(mae_1.size()) + " vs " +
                                          std::to_string(mae_2.size()) + ")");
  }
  if (mae_1.size() < 2) throw Error(ErrorKind::insufficient_samples, "need at least 2 folds");
  const auto a = eval::mean_and_sample_sd(mae_1);
  const auto b = eval::mean_and_sample_sd(mae_2);

  TTestReport r;
  r.mean1 = a.mean;
  r.mean2 = b.mean;
  r.var1 = a.variance;
  r.var2 = b.variance;
  r.n_oil = mae_1.size();
  r.s_p = pooled_sd(r.var1, r.var2, r.n_oil);
  r.t_value = t_statistic(r.mean1, r.mean2, r.s_p, r.n_oil);
  r.dof = 2 * r.n_oil - 2;
  r.alpha = alpha;
  r.two_sided = two_sided;
  r.t_critical = t_critical(two_sided ? alpha / 2.0 : alpha, static_cast<double>(r.dof));
  r.reject_equal_means = two_sided ? std::abs(r.t_value) > r.t_critical : r.t_value > r.t_critical;
  return r;
}

std::string TTestReport::to_json() const {
  const nlohmann::json j{{"mean1", mean1},
                         {"mean2", mean2},
                         {"var1", var1},
                         {"var2", var2},
                         {"n_oil", n_oil},
                         {"s_p", s_p},
                         {"t_value", t_value},
                         {"dof", dof},
                         {"alpha", alpha},
                         {"t_critical", t_critical},
                         {"two_sided", two_sided},
                         {"reject_equal_means", reject_equal_means}};
  return j.dump(2);
}

}  // namespace fluocnn::stats
