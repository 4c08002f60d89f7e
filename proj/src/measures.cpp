#include "dualiscope/measures.hpp"

#include <algorithm>
#include <cmath>

#include "dualiscope/duality.hpp"
#include "dualiscope/errors.hpp"
#include "dualiscope/mathfns.hpp"

namespace dualiscope {

ProductMeasureSpec ProductMeasureSpec::discrete_gamma(const Rat& m,
                                                      std::vector<Rat> lambda) {
  if (m <= 0) throw InvalidParameter("discrete-gamma family needs m > 0");
  for (const Rat& l : lambda)
    if (l < 0 || l >= 1)
      throw InvalidParameter("lambda profile must lie in [0, 1)");
  ProductMeasureSpec s;
  s.family = Family::DiscreteGamma;
  s.m = m;
  s.profile = std::move(lambda);
  return s;
}

ProductMeasureSpec ProductMeasureSpec::binomial(long n, std::vector<Rat> rho) {
  if (n < 1) throw InvalidParameter("binomial family needs n >= 1");
  for (const Rat& r : rho)
    if (r < 0 || r > 1)
      throw InvalidParameter("rho profile must lie in [0, 1]");
  ProductMeasureSpec s;
  s.family = Family::Binomial;
  s.cap = n;
  s.profile = std::move(rho);
  return s;
}

ProductMeasureSpec ProductMeasureSpec::gaussian(std::vector<Rat> variance) {
  for (const Rat& v : variance)
    if (v < 0) throw InvalidParameter("variance profile must be nonnegative");
  ProductMeasureSpec s;
  s.family = Family::Gaussian;
  s.profile = std::move(variance);
  return s;
}

ProductMeasureSpec ProductMeasureSpec::gamma(const Rat& m,
                                             std::vector<Rat> theta) {
  if (m <= 0) throw InvalidParameter("gamma family needs m > 0");
  for (const Rat& t : theta)
    if (t <= 0) throw InvalidParameter("scale profile must be positive");
  ProductMeasureSpec s;
  s.family = Family::Gamma;
  s.m = m;
  s.profile = std::move(theta);
  return s;
}

Rat ProductMeasureSpec::density(int site) const {
  const Rat& p = profile.at(site);
  switch (family) {
    case Family::DiscreteGamma:
      return p / (1 - p);
    case Family::Binomial:
    case Family::Gaussian:
      return p;
    case Family::Gamma:
      return p / 2;
  }
  return 0;
}

std::string ProductMeasureSpec::family_name() const {
  switch (family) {
    case Family::DiscreteGamma:
      return "DiscreteGamma(" + rat_str(m) + ")";
    case Family::Binomial:
      return "Binomial(" + std::to_string(cap) + ")";
    case Family::Gaussian:
      return "Gaussian";
    case Family::Gamma:
      return "Gamma(" + rat_str(m) + ")";
  }
  return "?";
}

Rat nu_weight(long k, const Rat& m, const Rat& lambda) {
  if (k < 0) throw InvalidParameter("negative occupation");
  if (lambda < 0 || lambda >= 1)
    throw InvalidParameter("lambda must lie in [0, 1)");
  return rat_pow(lambda, k) * rising_factorial(m / 2, k) / factorial(k);
}

double nu_pmf(long k, const Rat& m, const Rat& lambda) {
  const double normalization =
      std::pow(1.0 - to_double(lambda), to_double(m) / 2.0);
  return normalization * to_double(nu_weight(k, m, lambda));
}

Rat binomial_pmf(long k, long n, const Rat& rho) {
  if (k < 0 || k > n) return 0;
  return binomial_coeff(n, k) * rat_pow(rho, k) * rat_pow(1 - rho, n - k);
}

Rat convolution_deviation(const Rat& m, const Rat& l, const Rat& lambda,
                          long k_max) {
  if (m <= 0 || l <= 0) throw InvalidParameter("convolution needs m, l > 0");
  Rat worst = 0;
  for (long k = 0; k <= k_max; ++k) {
    Rat conv = 0;
    for (long j = 0; j <= k; ++j)
      conv += nu_weight(j, m, lambda) * nu_weight(k - j, l, lambda);
    Rat gap = rat_abs(conv - nu_weight(k, m + l, lambda));
    if (gap > worst) worst = gap;
  }
  return worst;
}

Rat d_moment(const DualConfig& xi, const ProductMeasureSpec& spec) {
  if (static_cast<int>(xi.size()) != spec.sites())
    throw InvalidConfig("dual configuration length does not match the profile");
  Rat out = 1;
  for (int x = 0; x < spec.sites(); ++x) {
    if (xi[x] < 0) throw InvalidConfig("negative dual occupation");
    if (xi[x] == 0) continue;
    if (spec.family == ProductMeasureSpec::Family::Binomial &&
        xi[x] > spec.cap)
      throw InvalidPairing("dual occupancy above the binomial cap");
    out *= rat_pow(spec.density(x), xi[x]);
  }
  return out;
}

Rat uniform_moment_bound(const ProductMeasureSpec& spec, long n) {
  if (n < 0) throw InvalidParameter("negative dual particle count");
  if (spec.sites() == 0) throw InvalidParameter("empty profile");
  Rat top = spec.density(0);
  for (int x = 1; x < spec.sites(); ++x)
    if (spec.density(x) > top) top = spec.density(x);
  return rat_pow(top, n);
}

SeriesCheck sip_d_moment_series(long k0, const Rat& m, const Rat& lambda,
                                double tail_tol) {
  if (tail_tol <= 0) throw InvalidParameter("tail tolerance must be > 0");
  SeriesCheck check;
  check.target = to_double(rat_pow(lambda / (1 - lambda), k0));
  if (lambda == 0) {
    check.sum = k0 == 0 ? 1.0 : 0.0;
    check.terms = 1;
    return check;
  }
  const double normalization =
      std::pow(1.0 - to_double(lambda), to_double(m) / 2.0);
  const double lambda_d = to_double(lambda);
  const double m_half = to_double(m) / 2.0;
  double sum = 0;
  for (long k = 0;; ++k) {
    const double term =
        normalization * to_double(sip_d(k0, k, m) * nu_weight(k, m, lambda));
    sum += term;
    if (k >= k0 && k >= 1) {
      // Term ratio is lambda (m/2+k)/(k+1-k0), monotone toward lambda from
      // one side; its sup over the tail is bounded by this:
      const double ratio =
          lambda_d * std::max(1.0, (m_half + k) / (k + 1.0 - k0));
      if (ratio < 1.0) {
        const double tail = std::abs(term) * ratio / (1.0 - ratio);
        if (tail < tail_tol) {
          check.tail_bound = tail;
          check.terms = k + 1;
          break;
        }
      }
    }
    if (k > 2'000'000)
      throw ResourceError("duality-moment series did not converge");
  }
  check.sum = sum;
  return check;
}

std::vector<int> sample_occupation(const ProductMeasureSpec& spec, Rng& rng) {
  std::vector<int> out(spec.sites(), 0);
  switch (spec.family) {
    case ProductMeasureSpec::Family::DiscreteGamma:
      for (int x = 0; x < spec.sites(); ++x) {
        const Rat& lambda = spec.profile[x];
        if (lambda == 0) continue;
        // Negative binomial NB(m/2, lambda) as a Gamma(m/2,
        // lambda/(1-lambda))-mixed Poisson; exact in distribution for
        // every m > 0.
        const double mixing =
            rng.gamma(to_double(spec.m) / 2.0, to_double(spec.density(x)));
        out[x] = static_cast<int>(rng.poisson(mixing));
      }
      return out;
    case ProductMeasureSpec::Family::Binomial:
      for (int x = 0; x < spec.sites(); ++x)
        out[x] = static_cast<int>(
            rng.binomial(spec.cap, to_double(spec.profile[x])));
      return out;
    default:
      throw InvalidPairing("occupation samples need a discrete family");
  }
}

std::vector<double> sample_product(const ProductMeasureSpec& spec, Rng& rng) {
  switch (spec.family) {
    case ProductMeasureSpec::Family::DiscreteGamma:
    case ProductMeasureSpec::Family::Binomial: {
      auto ints = sample_occupation(spec, rng);
      return std::vector<double>(ints.begin(), ints.end());
    }
    case ProductMeasureSpec::Family::Gaussian: {
      std::vector<double> out(spec.sites());
      for (int x = 0; x < spec.sites(); ++x)
        out[x] = rng.normal() * std::sqrt(to_double(spec.profile[x]));
      return out;
    }
    case ProductMeasureSpec::Family::Gamma: {
      std::vector<double> out(spec.sites());
      for (int x = 0; x < spec.sites(); ++x)
        out[x] =
            rng.gamma(to_double(spec.m) / 2.0, to_double(spec.profile[x]));
      return out;
    }
  }
  throw InvalidParameter("unknown measure family");
}

namespace {

ChiSquareReport finalize_chi_square(std::vector<double> observed,
                                    std::vector<double> expected, long draws) {
  // Merge adjacent bins until every expected count is >= 5.
  std::vector<double> obs_m, exp_m;
  double o_acc = 0, e_acc = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += expected[i];
    if (e_acc >= 5.0) {
      obs_m.push_back(o_acc);
      exp_m.push_back(e_acc);
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (!exp_m.empty()) {
      obs_m.back() += o_acc;
      exp_m.back() += e_acc;
    } else {
      obs_m.push_back(o_acc);
      exp_m.push_back(e_acc);
    }
  }
  ChiSquareReport report;
  report.draws = draws;
  report.bins = static_cast<long>(obs_m.size());
  if (report.bins < 2) return report;  // degenerate marginal: nothing to test
  for (std::size_t i = 0; i < obs_m.size(); ++i) {
    const double diff = obs_m[i] - exp_m[i];
    report.statistic += diff * diff / exp_m[i];
  }
  report.dof = report.bins - 1;
  report.p_value = chi_square_tail(report.statistic, report.dof);
  return report;
}

}  // namespace

ChiSquareReport sampler_goodness_of_fit(const ProductMeasureSpec& spec,
                                        int site, long draws,
                                        std::uint64_t seed) {
  if (draws < 100) throw InvalidParameter("need at least 100 draws");
  Rng rng(seed);
  using Family = ProductMeasureSpec::Family;

  if (spec.family == Family::DiscreteGamma || spec.family == Family::Binomial) {
    // Support cutoff at cumulative mass 1 - 1e-9; everything above lands in
    // the last bin.
    std::vector<double> pmf;
    double cumulative = 0;
    for (long k = 0; k <= 100000; ++k) {
      double p = spec.family == Family::DiscreteGamma
                     ? nu_pmf(k, spec.m, spec.profile[site])
                     : to_double(binomial_pmf(k, spec.cap, spec.profile[site]));
      pmf.push_back(p);
      cumulative += p;
      if (cumulative > 1.0 - 1e-9) break;
      if (spec.family == Family::Binomial && k == spec.cap) break;
    }
    const long support = static_cast<long>(pmf.size());
    std::vector<double> observed(support + 1, 0), expected(support + 1, 0);
    for (long i = 0; i < support; ++i) expected[i] = pmf[i] * draws;
    expected[support] = std::max(0.0, 1.0 - cumulative) * draws;
    ProductMeasureSpec single = spec;
    single.profile = {spec.profile[site]};
    for (long d = 0; d < draws; ++d) {
      long k = sample_occupation(single, rng)[0];
      observed[std::min(k, support)] += 1;
    }
    return finalize_chi_square(std::move(observed), std::move(expected), draws);
  }

  // Continuous families: fixed grid of half-sigma bins around the bulk of
  // the distribution, expected mass from the CDF.
  std::vector<double> edges;
  const double p = to_double(spec.profile[site]);
  if (spec.family == Family::Gaussian) {
    if (p == 0) return ChiSquareReport{0, 0, 1, draws, 1};
    const double sigma = std::sqrt(p);
    for (double x = -4; x <= 4; x += 0.5) edges.push_back(x * sigma);
  } else {
    const double shape = to_double(spec.m) / 2.0;
    const double mean = shape * p;
    const double sigma = std::sqrt(shape) * p;
    for (double x = 0; x <= mean + 6 * sigma; x += sigma / 2) edges.push_back(x);
  }
  auto cdf = [&](double x) {
    return spec.family == Family::Gaussian
               ? normal_cdf(x / std::sqrt(p))
               : gamma_cdf(x, to_double(spec.m) / 2.0, p);
  };
  const long bins = static_cast<long>(edges.size()) + 1;
  std::vector<double> observed(bins, 0), expected(bins, 0);
  double prev = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    double c = cdf(edges[i]);
    expected[i] = (c - prev) * draws;
    prev = c;
  }
  expected[bins - 1] = (1.0 - prev) * draws;
  ProductMeasureSpec single = spec;
  single.profile = {spec.profile[site]};
  for (long d = 0; d < draws; ++d) {
    double v = sample_product(single, rng)[0];
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    observed[it - edges.begin()] += 1;
  }
  return finalize_chi_square(std::move(observed), std::move(expected), draws);
}

}  // namespace dualiscope
