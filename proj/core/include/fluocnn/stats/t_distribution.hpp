#pragma once

namespace fluocnn::stats {

/// Regularized incomplete beta I_x(a, b), evaluated by the continued
/// fraction (modified Lentz) on whichever side converges. Throws
/// Error(domain) for a, b <= 0 or x outside [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// P(T >= t) for Student's t with `dof` degrees of freedom.
double t_upper_tail(double t, double dof);

/// P(T <= t).
double t_cdf(double t, double dof);

/// Upper-tail quantile t_alpha with P(T >= t_alpha) = alpha, found by
/// bisection on t_upper_tail to 1e-10 relative width. Requires
/// 0 < alpha < 0.5 and dof >= 1.
double t_critical(double alpha, double dof);

}  // namespace fluocnn::stats
