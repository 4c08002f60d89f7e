#pragma once

namespace dualiscope {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x),
// series expansion for x < a+1 and continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_tail(double statistic, long dof);

// Standard normal CDF.
double normal_cdf(double x);

// CDF of the Gamma(shape, scale) distribution.
double gamma_cdf(double x, double shape, double scale);

}  // namespace dualiscope
