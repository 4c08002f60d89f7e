#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dualiscope/duality.hpp"
#include "dualiscope/errors.hpp"
#include "dualiscope/inequalities.hpp"
#include "dualiscope/semigroup.hpp"

using namespace dualiscope;

TEST_CASE("symmetry and positive definiteness of tables") {
  // product form g(x) g(y) with g >= 0: rank-one pair matrices, PD
  PDFunction prod = PDFunction::from_exact(
      2, 2, {Rat(1), Rat(2), Rat(2), Rat(4)});  // g = (1,2)
  CHECK(is_symmetric_function(prod));
  auto verdict = is_positive_definite(prod);
  CHECK(verdict.pass);
  CHECK(verdict.exact_path);
  CHECK(verdict.min_eigenvalue >= -1e-10);

  // identity indicator I(x = y): PSD
  PDFunction ident = PDFunction::from_exact(
      2, 2, {Rat(1), Rat(0), Rat(0), Rat(1)});
  CHECK(is_positive_definite(ident).pass);

  // -I(x = y): negative definite
  PDFunction neg = PDFunction::from_exact(
      2, 2, {Rat(-1), Rat(0), Rat(0), Rat(-1)});
  CHECK(!is_positive_definite(neg).pass);
  CHECK(is_positive_definite(neg).min_eigenvalue < -1e-10);

  // asymmetric table is caught
  PDFunction asym = PDFunction::from_exact(
      2, 2, {Rat(0), Rat(1), Rat(2), Rat(0)});
  CHECK(!is_symmetric_function(asym));

  // random generator output is always symmetric and PD
  for (int i = 0; i < 25; ++i) {
    Rng rng(seed_stream(1001, i));
    PDFunction f = random_pd_function(3, 3, rng);
    CHECK(is_symmetric_function(f));
    CHECK(is_positive_definite(f).pass);
  }
}

TEST_CASE("comparison margins vanish at t = 0 and keep their sign") {
  SiteGraph g = SiteGraph::chain(3);
  Rng rng(77);
  PDFunction f = random_pd_function(3, 2, rng);

  auto at0 = comparison_check(g, 2, Rat(2), Rat(4), f, 0.0, 1e-12);
  CHECK(at0.pass);
  CHECK(at0.worst_margin == 0.0);

  // margin is exactly zero at t = 0 for every admissible input
  for (int i = 0; i < 10; ++i) {
    Rng r2(seed_stream(400, i));
    PDFunction fi = random_pd_function(3, 2, r2);
    CHECK(comparison_check(g, 2, Rat(1), Rat(-1), fi, 0.0, 1e-12)
              .worst_margin == 0.0);
    CHECK(comparison_check(g, 2, Rat(3, 2), Rat(4), fi, 0.0, 1e-12)
              .worst_margin == 0.0);
  }

  // attraction dominates: T f >= U f on PD symmetric f
  auto attract = comparison_check(g, 2, Rat(2), Rat(4), f, 1.0, 1e-12);
  CHECK(attract.pass);
  // exclusion is dominated
  auto exclude = comparison_check(g, 2, Rat(1), Rat(-1), f, 1.0, 1e-12);
  CHECK(exclude.pass);

  // identity indicator on the two-site graph, both directions
  SiteGraph two({"u", "v"}, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
  PDFunction ident = PDFunction::from_exact(
      2, 2, {Rat(1), Rat(0), Rat(0), Rat(1)});
  CHECK(comparison_check(two, 2, Rat(2), Rat(4), ident, 1.0, 1e-12).pass);
  CHECK(comparison_check(two, 2, Rat(1), Rat(-1), ident, 1.0, 1e-12).pass);

  // hypothesis violations are precondition errors
  PDFunction bad = PDFunction::from_exact(
      2, 2, {Rat(-1), Rat(0), Rat(0), Rat(-1)});
  CHECK_THROWS_AS(comparison_check(two, 2, Rat(2), Rat(4), bad, 1.0, 1e-12),
                  PreconditionError);
  PDFunction asym = PDFunction::from_exact(
      2, 2, {Rat(0), Rat(1), Rat(2), Rat(0)});
  CHECK_THROWS_AS(comparison_check(two, 2, Rat(2), Rat(4), asym, 1.0, 1e-12),
                  PreconditionError);
}

TEST_CASE("negative control: a non-PD function violates the ordering") {
  // The domination is a theorem about positive definite f only. For
  // f = -I(x = y) the clumping part pushes the interacting semigroup BELOW
  // the walkers, so the margin goes genuinely negative: the check is not a
  // tautology of the machinery.
  SiteGraph g({"u", "v"}, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
  GeneratorMatrix interacting = build_labeled_generator(g, 2, Rat(2), Rat(4));
  GeneratorMatrix walkers = build_labeled_generator(g, 2, Rat(2), Rat(0));
  auto table = [&](const GeneratorMatrix& G) {
    std::vector<double> f(G.state_count());
    for (int s = 0; s < G.state_count(); ++s)
      f[s] = G.states[s][0] == G.states[s][1] ? -1.0 : 0.0;
    return semigroup_apply(G, f, 0.1, 1e-12).values;
  };
  auto ev_int = table(interacting);
  auto ev_walk = table(walkers);
  const int apart = interacting.state_index({0, 1});
  const double margin = ev_int[apart] - ev_walk[walkers.state_index({0, 1})];
  CHECK(margin < -1e-3);
}

TEST_CASE("dual moment tables factorize at t = 0") {
  SiteGraph g = SiteGraph::chain(3);
  std::vector<Rat> rho = {Rat(1), Rat(2), Rat(3)};
  auto table = dual_moment_table(g, Rat(2), Rat(4), rho, 2, 0.0, 1e-12);
  CHECK(table.at({0, 2}) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(table.at({1, 1}) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("inclusion correlations are positive, exclusion negative") {
  SiteGraph g = SiteGraph::chain(3);
  std::vector<Rat> lambda = {Rat(1, 2), Rat(2, 3), Rat(3, 4)};  // rho 1,2,3
  auto sip0 = sip_correlation_check(g, Rat(1), lambda, {0, 2}, 0.0, 1e-12);
  CHECK(sip0.pass);
  CHECK(std::abs(sip0.worst_margin) < 1e-10);

  auto sip = sip_correlation_check(g, Rat(1), lambda, {0, 2}, 0.5, 1e-12);
  CHECK(sip.pass);
  CHECK(sip.worst_margin > 1e-6);  // strictly positive away from t = 0

  // doubled point is covered as well
  CHECK(sip_correlation_check(g, Rat(1), lambda, {1, 1}, 0.5, 1e-12).pass);
  // triple
  CHECK(sip_correlation_check(g, Rat(2), lambda, {0, 1, 2}, 0.4, 1e-12).pass);

  std::vector<Rat> rho = {Rat(1, 5), Rat(1, 2), Rat(4, 5)};
  auto sep0 = sep_correlation_check(g, 1, rho, {0, 2}, 0.0, 1e-12);
  CHECK(sep0.pass);
  auto sep = sep_correlation_check(g, 1, rho, {0, 2}, 0.5, 1e-12);
  CHECK(sep.pass);
  CHECK(sep.worst_margin > 1e-8);  // joint moment strictly below the product
  CHECK(sep_correlation_check(g, 3, rho, {0, 1, 2}, 0.5, 1e-12).pass);
  CHECK_THROWS_AS(sep_correlation_check(g, 1, rho, {1, 1}, 0.5, 1e-12),
                  InvalidConfig);
}

TEST_CASE("diffusion correlations through the dual") {
  SiteGraph g = SiteGraph::chain(3);
  std::vector<Rat> variances = {Rat(1), Rat(2), Rat(3)};
  auto bmp = diffusion_correlation_check(DiffusionCorrelationFamily::Bmp,
                                         Rat(1), g, variances, {0, 2}, 0.5,
                                         1e-12);
  CHECK(bmp.pass);
  CHECK(bmp.worst_margin > 1e-8);
  auto bep = diffusion_correlation_check(DiffusionCorrelationFamily::Bep,
                                         Rat(2), g, variances, {0, 2}, 0.5,
                                         1e-12);
  CHECK(bep.pass);
  // single point: margin exactly zero (product of one value)
  auto single = diffusion_correlation_check(DiffusionCorrelationFamily::Bmp,
                                            Rat(1), g, variances, {1}, 0.8,
                                            1e-12);
  CHECK(std::abs(single.worst_margin) < 1e-10);
}

TEST_CASE("boundary correlations: positive off equilibrium, equality at it") {
  // reservoir densities 1 and 3 (lambda 1/2 and 3/4), pair (2,3) on N = 4
  auto driven = boundary_correlation_check(4, Rat(1), Rat(1, 2), Rat(3, 4),
                                           {2, 3});
  CHECK(driven.pass);
  CHECK(driven.worst_margin > 0);
  auto diagonal = boundary_correlation_check(4, Rat(1), Rat(1, 3), Rat(3, 5),
                                             {2, 2});
  CHECK(diagonal.pass);
  CHECK(diagonal.worst_margin > 0);
  auto triple = boundary_correlation_check(4, Rat(1), Rat(1, 3), Rat(3, 5),
                                           {1, 2, 4});
  CHECK(triple.pass);

  auto balanced = boundary_correlation_check(4, Rat(1), Rat(2, 5), Rat(2, 5),
                                             {2, 3});
  CHECK(balanced.pass);
  CHECK(balanced.worst_margin == 0.0);

  // at equilibrium the steady-state moment is exactly rho^n
  {
    const Rat rho = Rat(2, 5) / Rat(3, 5);
    GeneratorMatrix gen = build_absorbing_dual_generator(4, Rat(1), 2);
    AbsorptionTable table = absorption_table(gen);
    CHECK(boundary_steady_moment(gen, table, {2, 3}, 4, rho, rho) ==
          rho * rho);
    CHECK(boundary_steady_moment(gen, table, {1, 1}, 4, rho, rho) ==
          rho * rho);
  }

  CHECK_THROWS_AS(
      boundary_correlation_check(3, Rat(1), Rat(1, 3), Rat(1, 2), {1, 2, 3, 3}),
      ResourceError);
  CHECK_THROWS_AS(
      boundary_correlation_check(3, Rat(1), Rat(1, 3), Rat(1, 2), {0, 1}),
      InvalidConfig);
}

TEST_CASE("density profile: affine always, interpolation only at m = 1/2") {
  auto half = density_profile(2, Rat(1, 2), Rat(0), Rat(1, 2));
  // rho_left = 0, rho_right = 1: values (1/3, 2/3)
  CHECK(half.moments[0] == Rat(1, 3));
  CHECK(half.moments[1] == Rat(2, 3));
  CHECK(half.max_interpolation_deviation == 0);

  auto one = density_profile(5, Rat(1), Rat(1, 3), Rat(3, 5));
  CHECK(one.max_abs_second_difference == 0);
  CHECK(one.max_interpolation_deviation > 0);  // reported, not rescaled

  auto flat = density_profile(4, Rat(2), Rat(2, 5), Rat(2, 5));
  for (const auto& v : flat.moments) CHECK(v == Rat(2, 3));
  CHECK(flat.max_interpolation_deviation == 0);
}

TEST_CASE("meeting diagnostics hold their ordering") {
  SiteGraph torus = SiteGraph::cycle(6);
  auto rows = meeting_probability_report(torus, Rat(1), {0, 3}, {0.0, 1.0},
                                         1e-12);
  REQUIRE(rows.size() == 2);
  // distinct starts: no meeting at t = 0
  CHECK(rows[0].meet_probability == doctest::Approx(0.0).epsilon(1e-12));
  for (const auto& row : rows) CHECK(row.ordered);

  // three particles on a triangle
  auto tri = meeting_probability_report(SiteGraph::cycle(3), Rat(2),
                                        {0, 1, 2}, {0.5}, 1e-12);
  CHECK(tri[0].ordered);
}

TEST_CASE("monomials expand exactly in the duality basis") {
  for (const auto& spec :
       {ProcessSpec::sip(Rat(1)), ProcessSpec::sip(Rat(7, 3))}) {
    for (int power = 0; power <= 3; ++power) {
      auto coeff = monomial_in_duality_basis(power, spec);
      for (long l = 0; l <= 12; ++l) {
        Rat acc = 0;
        for (int k = 0; k <= power; ++k)
          acc += coeff[k] * sip_d(k, l, spec.m);
        CHECK(acc == rat_pow(Rat(l), power));
      }
    }
  }
  // the m = 1 quadratic relation: with d(1,l) = 2l and d(2,l) = (4/3)(l^2-l),
  // eta^2 = (1/2) d(1, eta) + (3/4) d(2, eta), i.e. eta^2 - eta = (3/4) d(2, eta)
  auto c2 = monomial_in_duality_basis(2, ProcessSpec::sip(Rat(1)));
  CHECK(c2[0] == 0);
  CHECK(c2[1] == Rat(1, 2));
  CHECK(c2[2] == Rat(3, 4));

  auto sep = ProcessSpec::sep(3);
  auto c = monomial_in_duality_basis(2, sep);
  for (long l = 0; l <= 3; ++l) {
    Rat acc = 0;
    for (int k = 0; k <= 2; ++k) acc += c[k] * sep_d(k, l, 3);
    CHECK(acc == Rat(l * l));
  }
}

TEST_CASE("occupation covariance is positive for the driven inclusion start") {
  SiteGraph g = SiteGraph::chain(3);
  std::vector<Rat> lambda = {Rat(1, 2), Rat(2, 3), Rat(3, 4)};
  auto cov = occupation_covariance(g, Rat(1), lambda, 0, 2, 0.5, 1e-12);
  CHECK(cov.covariance > 0);
  // one-point means match the dual one-particle computation: at t=0,
  // E[eta_x] = (m/2) rho(x)
  auto at0 = occupation_covariance(g, Rat(1), lambda, 0, 1, 0.0, 1e-12);
  CHECK(at0.mean_x == doctest::Approx(0.5).epsilon(1e-12));   // (1/2) * 1
  CHECK(at0.mean_y == doctest::Approx(1.0).epsilon(1e-12));   // (1/2) * 2
  // variance of the geometric-like marginal at t=0: for m=2, lambda=1/2
  // the site marginal is geometric with variance 2
  SiteGraph one_site_pair({"a", "b"}, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
  auto var = occupation_covariance(one_site_pair, Rat(2),
                                   {Rat(1, 2), Rat(1, 2)}, 0, 0, 0.0, 1e-12);
  CHECK(var.covariance == doctest::Approx(2.0).epsilon(1e-10));
}
