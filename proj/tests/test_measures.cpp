#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dualiscope/errors.hpp"
#include "dualiscope/measures.hpp"

using namespace dualiscope;

TEST_CASE("stationary pmf of the inclusion process") {
  // m = 2 is geometric: nu(k) = lambda^k (1 - lambda)
  for (long k = 0; k <= 10; ++k)
    CHECK(nu_pmf(k, Rat(2), Rat(1, 2)) ==
          doctest::Approx(std::pow(0.5, k) * 0.5).epsilon(1e-14));
  // k = 0 carries the normalization (1 - lambda)^{m/2}
  CHECK(nu_pmf(0, Rat(3), Rat(1, 4)) ==
        doctest::Approx(std::pow(0.75, 1.5)).epsilon(1e-14));
  // lambda = 0 is the point mass at zero
  CHECK(nu_pmf(0, Rat(1), Rat(0)) == 1.0);
  CHECK(nu_pmf(3, Rat(1), Rat(0)) == 0.0);
  CHECK_THROWS_AS(nu_weight(0, Rat(1), Rat(1)), InvalidParameter);

  // mass sums to one within a small tail
  double total = 0;
  for (long k = 0; k < 200; ++k) total += nu_pmf(k, Rat(7, 3), Rat(1, 2));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("convolution property is exact") {
  CHECK(convolution_deviation(Rat(2), Rat(2), Rat(1, 2), 20) == 0);
  CHECK(convolution_deviation(Rat(1), Rat(3), Rat(1, 2), 50) == 0);
  CHECK(convolution_deviation(Rat(1, 2), Rat(3, 2), Rat(1, 3), 50) == 0);
  CHECK(convolution_deviation(Rat(2), Rat(2), Rat(0), 10) == 0);
  // mismatched target exposes a nonzero deviation: compare m+l vs m+l+1
  Rat conv = 0;
  for (long j = 0; j <= 3; ++j)
    conv += nu_weight(j, Rat(2), Rat(1, 2)) *
            nu_weight(3 - j, Rat(2), Rat(1, 2));
  CHECK(conv != nu_weight(3, Rat(5), Rat(1, 2)));
}

TEST_CASE("duality moments of product measures") {
  auto spec = ProductMeasureSpec::discrete_gamma(
      Rat(1), {Rat(1, 2), Rat(2, 3), Rat(0)});
  CHECK(d_moment({0, 0, 0}, spec) == 1);
  CHECK(spec.density(0) == 1);
  CHECK(spec.density(1) == 2);
  CHECK(d_moment({1, 1, 0}, spec) == 2);
  CHECK(d_moment({2, 1, 0}, spec) == 2);  // multiplicities multiply densities
  // constant profile: (lambda/(1-lambda))^{|xi|}
  auto flat = ProductMeasureSpec::discrete_gamma(Rat(2), {Rat(1, 3), Rat(1, 3)});
  CHECK(d_moment({2, 1}, flat) == rat_pow(Rat(1, 2), 3));

  auto bin = ProductMeasureSpec::binomial(2, {Rat(1, 4), Rat(3, 4)});
  CHECK(d_moment({1, 2}, bin) == Rat(1, 4) * Rat(9, 16));
  CHECK_THROWS_AS(d_moment({3, 0}, bin), InvalidPairing);

  auto gam = ProductMeasureSpec::gamma(Rat(3), {Rat(2), Rat(4)});
  CHECK(gam.density(0) == 1);  // theta/2
  CHECK(d_moment({0, 2}, gam) == 4);
}

TEST_CASE("uniform moment bound") {
  auto spec = ProductMeasureSpec::discrete_gamma(Rat(1), {Rat(1, 3), Rat(1, 2)});
  CHECK(uniform_moment_bound(spec, 3) == 1);  // max density = 1/2 / (1/2) = 1
  auto half = ProductMeasureSpec::discrete_gamma(Rat(1), {Rat(1, 3)});
  CHECK(uniform_moment_bound(half, 3) == Rat(1, 8));
  CHECK(uniform_moment_bound(half, 0) == 1);
  auto two = ProductMeasureSpec::gaussian({Rat(2), Rat(1)});
  CHECK(uniform_moment_bound(two, 2) == 4);
}

TEST_CASE("duality moment series with certified tails") {
  for (const Rat& m : {Rat(1, 2), Rat(1), Rat(7, 3)})
    for (const Rat& lambda : {Rat(1, 3), Rat(1, 2)})
      for (long k0 = 0; k0 <= 4; ++k0) {
        auto series = sip_d_moment_series(k0, m, lambda, 1e-13);
        CHECK(series.tail_bound < 1e-12);
        CHECK(std::abs(series.sum - series.target) <
              1e-12 * std::max(1.0, std::abs(series.target)));
      }
  auto degenerate = sip_d_moment_series(2, Rat(1), Rat(0), 1e-13);
  CHECK(degenerate.sum == 0.0);
  CHECK(degenerate.target == 0.0);
}

TEST_CASE("samplers hit their means") {
  auto spec = ProductMeasureSpec::discrete_gamma(Rat(2), {Rat(1, 2)});
  Rng rng(101);
  double total = 0;
  const long draws = 100000;
  for (long i = 0; i < draws; ++i) total += sample_occupation(spec, rng)[0];
  // mean of the geometric m=2, lambda=1/2 marginal is 1, sd = sqrt(2)
  const double mean = total / draws;
  CHECK(std::abs(mean - 1.0) < 3 * std::sqrt(2.0 / draws));

  // degenerate cases
  auto zero = ProductMeasureSpec::discrete_gamma(Rat(1), {Rat(0)});
  CHECK(sample_occupation(zero, rng)[0] == 0);
  auto full = ProductMeasureSpec::binomial(3, {Rat(1)});
  CHECK(sample_occupation(full, rng)[0] == 3);

  auto gauss = ProductMeasureSpec::gaussian({Rat(4)});
  double acc = 0, acc2 = 0;
  for (long i = 0; i < draws; ++i) {
    double v = sample_product(gauss, rng)[0];
    acc += v;
    acc2 += v * v;
  }
  CHECK(std::abs(acc / draws) < 3 * std::sqrt(4.0 / draws));
  CHECK(std::abs(acc2 / draws - 4.0) < 3 * std::sqrt(32.0 / draws) + 0.01);

  CHECK_THROWS_AS(sample_occupation(gauss, rng), InvalidPairing);
}

TEST_CASE("goodness of fit at pinned seeds") {
  auto nb = ProductMeasureSpec::discrete_gamma(Rat(7, 3), {Rat(1, 3)});
  auto fit = sampler_goodness_of_fit(nb, 0, 20000, 4244);
  CHECK(fit.p_value > 0.001);
  CHECK(fit.bins >= 3);

  auto gam = ProductMeasureSpec::gamma(Rat(3, 2), {Rat(2)});
  auto gfit = sampler_goodness_of_fit(gam, 0, 20000, 4245);
  CHECK(gfit.p_value > 0.001);
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(ProductMeasureSpec::discrete_gamma(Rat(1), {Rat(1)}),
                  InvalidParameter);
  CHECK_THROWS_AS(ProductMeasureSpec::binomial(0, {Rat(1, 2)}),
                  InvalidParameter);
  CHECK_THROWS_AS(ProductMeasureSpec::gaussian({Rat(-1)}), InvalidParameter);
  CHECK_THROWS_AS(ProductMeasureSpec::gamma(Rat(1), {Rat(0)}),
                  InvalidParameter);
}
