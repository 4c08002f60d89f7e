#pragma once

#include <string>
#include <vector>

#include "dualiscope/config.hpp"
#include "dualiscope/exact.hpp"
#include "dualiscope/rng.hpp"

namespace dualiscope {

// Product measure with a site-dependent parameter profile. Families and
// their parameters:
//   DiscreteGamma(m): lambda(x) in [0,1)  — stationary for the inclusion
//                     process; negative binomial NB(m/2, lambda)
//   Binomial(n):      rho(x) in [0,1]     — stationary for exclusion
//   Gaussian:         variance rho(x) >= 0, mean zero
//   Gamma(m):         scale theta(x) > 0, shape m/2
struct ProductMeasureSpec {
  enum class Family { DiscreteGamma, Binomial, Gaussian, Gamma };

  Family family = Family::DiscreteGamma;
  Rat m;                     // DiscreteGamma / Gamma
  long cap = 0;              // Binomial n
  std::vector<Rat> profile;  // per-site parameter

  static ProductMeasureSpec discrete_gamma(const Rat& m,
                                           std::vector<Rat> lambda);
  static ProductMeasureSpec binomial(long n, std::vector<Rat> rho);
  static ProductMeasureSpec gaussian(std::vector<Rat> variance);
  static ProductMeasureSpec gamma(const Rat& m, std::vector<Rat> theta);

  int sites() const { return static_cast<int>(profile.size()); }

  // Dual-particle density at a site: lambda/(1-lambda), rho, the variance,
  // or theta/2 respectively (for Gamma, the value of the single-site
  // integral of the energy duality monomial).
  Rat density(int site) const;

  std::string family_name() const;
};

// Normalized stationary pmf of the inclusion process at one site:
// nu(k) = (1-lambda)^{m/2} lambda^k/k! (m/2)(m/2+1)...(m/2+k-1).
double nu_pmf(long k, const Rat& m, const Rat& lambda);

// Exact unnormalized core lambda^k (m/2)_k / k!. The normalization
// (1-lambda)^{m/2} is irrational for odd m, so exact identities compare
// cores (the normalizations match on both sides of every identity used).
Rat nu_weight(long k, const Rat& m, const Rat& lambda);

// Exact binomial weight C(n,k) rho^k (1-rho)^{n-k}.
Rat binomial_pmf(long k, long n, const Rat& rho);

// Max entrywise deviation of the convolution of the m- and l-cores from the
// (m+l)-core up to k_max. Exactly zero for every rational input.
Rat convolution_deviation(const Rat& m, const Rat& l, const Rat& lambda,
                          long k_max);

// Product over sites of density(x)^{xi_x}; exact, valid for arbitrary
// multiplicities. For Binomial, requires xi_x <= n.
Rat d_moment(const DualConfig& xi, const ProductMeasureSpec& spec);

// sup over |xi| = n of the D-moment: (max site density)^n.
Rat uniform_moment_bound(const ProductMeasureSpec& spec, long n);

// Truncated summation of sum_k d(k0,k) nu(k) with a certified geometric
// tail bound, for checking the closed form density^{k0} numerically.
struct SeriesCheck {
  double sum = 0;
  double target = 0;
  double tail_bound = 0;
  long terms = 0;
};
SeriesCheck sip_d_moment_series(long k0, const Rat& m, const Rat& lambda,
                                double tail_tol);

// One independent draw per site.
std::vector<int> sample_occupation(const ProductMeasureSpec& spec, Rng& rng);
std::vector<double> sample_product(const ProductMeasureSpec& spec, Rng& rng);

// Chi-square goodness of fit of the site marginal sampler (bins merged to
// expected count >= 5).
struct ChiSquareReport {
  double statistic = 0;
  long dof = 0;
  double p_value = 1;
  long draws = 0;
  long bins = 0;
};
ChiSquareReport sampler_goodness_of_fit(const ProductMeasureSpec& spec,
                                        int site, long draws,
                                        std::uint64_t seed);

}  // namespace dualiscope
