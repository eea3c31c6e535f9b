#include "fluocnn/stats/t_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluocnn/error.hpp"

namespace fluocnn::stats {

namespace {

constexpr int kMaxIterations = 200000;
constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b) / prefactor (Numerical Recipes betacf).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorKind::internal_consistency, "incomplete beta continued fraction did not converge");
}

// I_x(a, b) given both x and y = 1 - x, so callers can pass a y that was
// computed without cancellation.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::domain, "incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::domain, "incomplete beta needs x in [0, 1]");
  return incomplete_beta(a, b, x, 1.0 - x);
}

double t_upper_tail(double t, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorKind::domain, "degrees of freedom must be > 0");
  if (std::isnan(t)) throw Error(ErrorKind::domain, "t is NaN");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double t2 = t * t;
  const double denom = dof + t2;
  // P(|T| >= |t|) = I_{dof/(dof+t^2)}(dof/2, 1/2)
  const double two_sided = incomplete_beta(0.5 * dof, 0.5, dof / denom, t2 / denom);
  return t >= 0.0 ? 0.5 * two_sided : 1.0 - 0.5 * two_sided;
}

double t_cdf(double t, double dof) { return 1.0 - t_upper_tail(t, dof); }

double t_critical(double alpha, double dof) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(ErrorKind::domain, "alpha must be in (0, 0.5)");
  }
  if (!(dof >= 1.0) || !std::isfinite(dof)) {
    throw Error(ErrorKind::domain, "degrees of freedom must be >= 1");
  }
  double lo = 0.0;
  double hi = 1.0;
  while (t_upper_tail(hi, dof) > alpha) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw Error(ErrorKind::domain, "t quantile out of range");
  }
  for (int i = 0; i < 400 && hi - lo > 1e-10 * std::max(1.0, lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (t_upper_tail(mid, dof) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace fluocnn::stats
