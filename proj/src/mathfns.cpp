#include "dualiscope/mathfns.hpp"

#include <cmath>
#include <stdexcept>

namespace dualiscope {

namespace {

// Lower incomplete gamma by its power series, P(a,x) for x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, Q(a,x) for x >= a+1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0 || x < 0)
    throw std::invalid_argument("incomplete gamma needs a > 0, x >= 0");
  if (x == 0) return 0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0 || x < 0)
    throw std::invalid_argument("incomplete gamma needs a > 0, x >= 0");
  if (x == 0) return 1;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_tail(double statistic, long dof) {
  if (dof <= 0) throw std::invalid_argument("chi-square needs dof >= 1");
  if (statistic <= 0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double gamma_cdf(double x, double shape, double scale) {
  if (x <= 0) return 0;
  return regularized_gamma_p(shape, x / scale);
}

}  // namespace dualiscope
