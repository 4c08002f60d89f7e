#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "dualiscope/duality.hpp"
#include "dualiscope/errors.hpp"
#include "dualiscope/inequalities.hpp"
#include "dualiscope/montecarlo.hpp"
#include "dualiscope/semigroup.hpp"

using namespace dualiscope;

namespace {

SiteGraph two_sites() {
  return SiteGraph({"u", "v"}, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
}

}  // namespace

TEST_CASE("zero-horizon trajectories") {
  SiteGraph g = two_sites();
  Rng rng(1);
  auto traj = simulate_ctmc(ProcessSpec::sip(Rat(1)), g, {2, 0}, 0.0, rng);
  CHECK(traj.states.size() >= 1);
  CHECK(traj.final_state() == OccupationConfig{2, 0});
  CHECK(traj.times.back() == 0.0);

  auto labeled = simulate_labeled(g, Rat(2), Rat(4), {0, 0}, 0.0, rng);
  CHECK(labeled.final_state() == LabeledConfig{0, 0});
}

TEST_CASE("frozen states never jump") {
  SiteGraph g = two_sites();
  Rng rng(2);
  auto packed = simulate_ctmc(ProcessSpec::sep(1), g, {1, 1}, 50.0, rng);
  CHECK(packed.jumps() == 0);
  CHECK(packed.final_state() == OccupationConfig{1, 1});
}

TEST_CASE("empirical law matches the semigroup") {
  SiteGraph g = two_sites();
  const Rat m(1);
  auto spec = ProcessSpec::sip(m);
  const double t = 0.3;
  const long replicas = 10000;
  long hits = 0;
  for (long r = 0; r < replicas; ++r) {
    Rng rng(seed_stream(99, r));
    auto traj = simulate_ctmc(spec, g, {2, 0}, t, rng, false);
    if (traj.final_state() == OccupationConfig{1, 1}) ++hits;
  }
  auto G = build_sector_generator(spec, g, 2);
  std::vector<double> indicator(G.state_count(), 0.0);
  indicator[G.state_index({1, 1})] = 1.0;
  const double p =
      semigroup_apply(G, indicator, t, 1e-12).values[G.state_index({2, 0})];
  const double sigma = std::sqrt(p * (1 - p) / replicas);
  CHECK(std::abs(static_cast<double>(hits) / replicas - p) < 3 * sigma);
}

TEST_CASE("labeled simulation: independent walkers and exit times") {
  SiteGraph g = two_sites();
  // single particle exit time from a site is exponential with mean 1/a
  const double a = 2.0;
  double total = 0;
  const long replicas = 20000;
  for (long r = 0; r < replicas; ++r) {
    Rng rng(seed_stream(7, r));
    auto traj = simulate_labeled(g, Rat(2), Rat(0), {0}, 50.0, rng);
    REQUIRE(traj.times.size() >= 2);
    total += traj.times[1];
  }
  const double mean = total / replicas;
  CHECK(std::abs(mean - 1 / a) < 3 * (1 / a) / std::sqrt(replicas));

  // b = 0: meeting probability of two walkers matches the closed form.
  // The equality indicator flips whenever either walker flips (rate 2a), so
  // started apart P(equal at t) = (1 - e^{-4at})/2.
  const double t = 0.2;
  long together = 0;
  for (long r = 0; r < replicas; ++r) {
    Rng rng(seed_stream(8, r));
    auto traj = simulate_labeled(g, Rat(2), Rat(0), {0, 1}, t, rng, false);
    if (traj.final_state()[0] == traj.final_state()[1]) ++together;
  }
  const double expected = 0.5 - 0.5 * std::exp(-4 * a * t);
  const double sigma = std::sqrt(expected * (1 - expected) / replicas);
  CHECK(std::abs(static_cast<double>(together) / replicas - expected) <
        3 * sigma);
}

TEST_CASE("labeled occupation projection agrees with the occupation law") {
  SiteGraph g = two_sites();
  const double t = 0.25;
  const long replicas = 10000;
  long labeled_hits = 0, occupation_hits = 0;
  for (long r = 0; r < replicas; ++r) {
    Rng rng_l(seed_stream(31, r)), rng_o(seed_stream(57, r));
    auto lab = simulate_labeled(g, Rat(2), Rat(4), {0, 0}, t, rng_l, false);
    if (occupation_of(lab.final_state(), 2) == OccupationConfig{1, 1})
      ++labeled_hits;
    auto occ = simulate_ctmc(ProcessSpec::sip(Rat(1)), g, {2, 0}, t, rng_o,
                             false);
    if (occ.final_state() == OccupationConfig{1, 1}) ++occupation_hits;
  }
  const double p1 = static_cast<double>(labeled_hits) / replicas;
  const double p2 = static_cast<double>(occupation_hits) / replicas;
  CHECK(std::abs(p1 - p2) < 3 * std::sqrt(0.5 / replicas) + 0.02);
}

TEST_CASE("momentum diffusion conserves the quadratic invariant") {
  SiteGraph g = SiteGraph::cycle(3);
  Rng rng(41);
  auto traj = simulate_bmp(g, {1.0, -0.4, 2.2}, 1.0, 0.01, rng);
  double initial = 0;
  for (double v : traj.states.front()) initial += v * v;
  for (const auto& s : traj.states) {
    double total = 0;
    for (double v : s) total += v * v;
    CHECK(std::abs(total - initial) <= 1e-12 * initial);
  }
  CHECK_THROWS_AS(simulate_bmp(g, {1, 0, 0}, 1.0, 0.0, rng),
                  InvalidParameter);
}

TEST_CASE("momentum diffusion relaxes to the flat temperature profile") {
  // Single edge: E[eta_x^2] -> (eta_x^2 + eta_y^2)/2, and the dual
  // single-particle computation gives the same value at finite t.
  SiteGraph g = two_sites();
  const double t = 0.6, dt = 0.002;
  const long replicas = 4000;
  double acc = 0;
  for (long r = 0; r < replicas; ++r) {
    Rng rng(seed_stream(43, r));
    auto traj = simulate_bmp(g, {2.0, 0.0}, t, dt, rng);
    acc += traj.final_state()[0] * traj.final_state()[0];
  }
  const double empirical = acc / replicas;
  // dual: one inclusion particle at rate 2m = 2 on the edge; the dual value
  // at a walker state is the squared start momentum at the walker's site
  auto G = build_sector_generator(ProcessSpec::sip(Rat(1)), g, 1);
  std::vector<double> temp(G.state_count());
  for (int s = 0; s < G.state_count(); ++s)
    temp[s] = G.states[s][0] == 1 ? 4.0 : 0.0;
  const double exact =
      semigroup_apply(G, temp, t, 1e-12).values[G.state_index({1, 0})];
  CHECK(std::abs(empirical - exact) < 0.25);  // 3 sigma + O(dt) headroom
}

TEST_CASE("energy diffusion conserves the total exactly") {
  SiteGraph g = SiteGraph::chain(3);
  Rng rng(47);
  auto traj = simulate_bep(g, {0.05, 1.0, 0.4}, Rat(1), 1.0, 0.01, rng);
  Rat initial = 0;
  for (double v : traj.states.front()) initial += rat_from_double(v);
  for (const auto& s : traj.states) {
    Rat total = 0;
    for (double v : s) total += rat_from_double(v);
    CHECK(total == initial);
    for (double v : s) CHECK(v >= 0);
  }
  // all-zero start stays zero
  Rng rng2(48);
  auto zero = simulate_bep(g, {0.0, 0.0, 0.0}, Rat(1), 0.5, 0.01, rng2);
  for (const auto& s : zero.states)
    for (double v : s) CHECK(v == 0.0);

  CHECK_THROWS_AS(simulate_bep(g, {1.0, 0.0, 0.0}, Rat(1), 0.5, 0.0, rng2),
                  InvalidParameter);
  CHECK_THROWS_AS(simulate_bep(g, {-1.0, 0.0, 0.0}, Rat(1), 0.5, 0.01, rng2),
                  InvalidConfig);
}

TEST_CASE("energy diffusion relaxes toward the flat profile") {
  SiteGraph g = two_sites();
  const Rat m(2);
  const double t = 0.5, dt = 0.001;
  const long replicas = 4000;
  double acc = 0;
  for (long r = 0; r < replicas; ++r) {
    Rng rng(seed_stream(53, r));
    auto traj = simulate_bep(g, {2.0, 0.0}, m, t, dt, rng);
    acc += traj.final_state()[0];
  }
  const double empirical = acc / replicas;
  auto G = build_sector_generator(ProcessSpec::sip(m), g, 1);
  std::vector<double> energy(G.state_count());
  for (int s = 0; s < G.state_count(); ++s)
    energy[s] = G.states[s][0] == 1 ? 2.0 : 0.0;
  const double exact =
      semigroup_apply(G, energy, t, 1e-12).values[G.state_index({1, 0})];
  CHECK(std::abs(empirical - exact) < 0.15);
}

TEST_CASE("duality moment estimator") {
  SiteGraph g = SiteGraph::chain(3);
  const Rat m(1);
  std::vector<Rat> lambda = {Rat(1, 3), Rat(1, 2), Rat(1, 4)};
  auto measure = ProductMeasureSpec::discrete_gamma(m, lambda);

  // empty dual configuration: mean exactly one, zero spread
  auto trivial = estimate_duality_moment(ProcessSpec::sip(m), g, measure,
                                         {0, 0, 0}, 0.5, 50, 11, 1);
  CHECK(trivial.mean == 1.0);
  CHECK(trivial.stderr_of_mean == 0.0);

  // t = 0: the closed-form product of densities
  std::vector<Rat> rho(3);
  for (int x = 0; x < 3; ++x) rho[x] = lambda[x] / (1 - lambda[x]);
  auto at0 = estimate_duality_moment(ProcessSpec::sip(m), g, measure,
                                     {1, 0, 1}, 0.0, 20000, 13, 0);
  const double target = to_double(rho[0] * rho[2]);
  CHECK(std::abs(at0.mean - target) < 3 * at0.stderr_of_mean);

  CHECK_THROWS_AS(estimate_duality_moment(ProcessSpec::sip(m), g, measure,
                                          {1, 0, 0}, 0.1, 1, 13, 0),
                  InvalidParameter);
  auto bin = ProductMeasureSpec::binomial(2, {Rat(1, 2), Rat(1, 2), Rat(1, 2)});
  CHECK_THROWS_AS(estimate_duality_moment(ProcessSpec::sip(m), g, bin,
                                          {1, 0, 0}, 0.1, 10, 13, 0),
                  InvalidPairing);
}

TEST_CASE("stationary time averages match the exact steady state") {
  const Rat m(1);
  auto spec = ProcessSpec::boundary_driven_sip(m, Rat(1, 3), Rat(3, 5), 3);
  auto profile = density_profile(3, m, Rat(1, 3), Rat(3, 5));
  auto est = stationary_time_average(
      spec,
      [&m](const OccupationConfig& eta) {
        return to_double(sip_d(1, eta[0], m));
      },
      20.0, 220.0, 71);
  CHECK(est.stderr_of_mean > 0);
  CHECK(std::abs(est.mean - to_double(profile.moments[0])) <
        3.5 * est.stderr_of_mean);

  // constant observable: exactly itself with zero spread
  auto constant = stationary_time_average(
      spec, [](const OccupationConfig&) { return 2.5; }, 10.0, 110.0, 72);
  CHECK(constant.mean == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(constant.stderr_of_mean == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(stationary_time_average(
                      spec, [](const OccupationConfig&) { return 0.0; }, 10.0,
                      5.0, 73),
                  InvalidParameter);
}

TEST_CASE("short-time transition frequencies follow the generator rates") {
  // P(eta_t = eta') = rate(eta -> eta') t + o(t) for each successor.
  SiteGraph g = two_sites();
  auto spec = ProcessSpec::sip(Rat(1));
  const OccupationConfig start = {1, 1};  // moves to (0,2) and (2,0), rate 6 each
  const double t = 0.01;
  const long replicas = 40000;
  long to_right = 0, to_left = 0;
  for (long r = 0; r < replicas; ++r) {
    Rng rng(seed_stream(61, r));
    auto traj = simulate_ctmc(spec, g, start, t, rng, false);
    if (traj.final_state() == OccupationConfig{0, 2}) ++to_right;
    if (traj.final_state() == OccupationConfig{2, 0}) ++to_left;
  }
  const double expected = 6 * t;
  const double sigma = std::sqrt(expected * (1 - expected) / replicas);
  const double slack = 100 * t * t;  // second-order corrections
  CHECK(std::abs(static_cast<double>(to_right) / replicas - expected) <
        3 * sigma + slack);
  CHECK(std::abs(static_cast<double>(to_left) / replicas - expected) <
        3 * sigma + slack);
}

TEST_CASE("trajectory reproducibility is bit-for-bit") {
  SiteGraph g = SiteGraph::chain(3);
  Rng r1(555), r2(555);
  auto t1 = simulate_ctmc(ProcessSpec::sip(Rat(7, 3)), g, {1, 2, 0}, 2.0, r1);
  auto t2 = simulate_ctmc(ProcessSpec::sip(Rat(7, 3)), g, {1, 2, 0}, 2.0, r2);
  CHECK(t1.times == t2.times);
  CHECK(t1.states == t2.states);
}
