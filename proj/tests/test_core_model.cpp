#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "dualiscope/errors.hpp"
#include "dualiscope/graph.hpp"
#include "dualiscope/process.hpp"
#include "dualiscope/rng.hpp"

using namespace dualiscope;

namespace {

SiteGraph two_sites() {
  return SiteGraph({"0", "1"}, {{Rat(0), Rat(1)}, {Rat(1), Rat(0)}});
}

}  // namespace

TEST_CASE("kernel validation") {
  CHECK(validate_kernel(two_sites()).empty());

  SiteGraph asym({"0", "1"}, {{Rat(0), Rat(1)}, {Rat(1, 2), Rat(1, 2)}});
  auto v = validate_kernel(asym);
  REQUIRE(!v.empty());
  bool symmetry = false, diagonal = false;
  for (const auto& s : v) {
    if (s.find("symmetry violation") != std::string::npos) symmetry = true;
    if (s.find("diagonal violation") != std::string::npos) diagonal = true;
  }
  CHECK(symmetry);
  CHECK(diagonal);

  // Open chains only violate the row sums, at the two end sites.
  auto chain_violations = validate_kernel(SiteGraph::chain(3));
  CHECK(chain_violations.size() == 2);
  CHECK(violations_are_row_sums_only(chain_violations));
  CHECK(validate_kernel(SiteGraph::cycle(3)).empty());
  CHECK(validate_kernel(SiteGraph::complete(4)).empty());

  SiteGraph disconnected(
      {"a", "b", "c", "d"},
      {{Rat(0), Rat(1), Rat(0), Rat(0)},
       {Rat(1), Rat(0), Rat(0), Rat(0)},
       {Rat(0), Rat(0), Rat(0), Rat(1)},
       {Rat(0), Rat(0), Rat(1), Rat(0)}});
  bool connectivity = false;
  for (const auto& s : validate_kernel(disconnected))
    if (s.find("not connected") != std::string::npos) connectivity = true;
  CHECK(connectivity);
}

TEST_CASE("inclusion jump rate") {
  SiteGraph g({"x", "y"}, {{Rat(0), Rat(1, 2)}, {Rat(1, 2), Rat(0)}});
  CHECK(sip_jump_rate({1, 0}, 0, 1, Rat(2), g) == 2);
  CHECK(sip_jump_rate({0, 3}, 0, 1, Rat(2), g) == 0);
  SiteGraph full = two_sites();
  CHECK(sip_jump_rate({2, 3}, 0, 1, Rat(1), full) == 28);
  CHECK_THROWS_AS(sip_jump_rate({1, 0}, 0, 0, Rat(1), full), InvalidMove);
}

TEST_CASE("exclusion jump rate") {
  SiteGraph g({"x", "y"}, {{Rat(0), Rat(1, 2)}, {Rat(1, 2), Rat(0)}});
  CHECK(sep_jump_rate({1, 1}, 0, 1, 1, g) == 0);  // full target blocks
  CHECK(sep_jump_rate({1, 0}, 0, 1, 1, g) == Rat(1, 2));
  SiteGraph q({"x", "y"}, {{Rat(0), Rat(1, 4)}, {Rat(1, 4), Rat(0)}});
  CHECK(sep_jump_rate({2, 1}, 0, 1, 3, q) == 1);
  CHECK_THROWS_AS(sep_jump_rate({4, 0}, 0, 1, 3, q), InvalidConfig);
}

TEST_CASE("labeled pair rate") {
  SiteGraph g = two_sites();
  CHECK(labeled_jump_rate({0, 0}, 0, 1, Rat(2), Rat(4), g) == 2);
  CHECK(labeled_jump_rate({0, 1}, 0, 1, Rat(2), Rat(4), g) == 6);
  CHECK(labeled_jump_rate({0, 1}, 0, 1, Rat(1), Rat(-1), g) == 0);
  CHECK_THROWS_AS(labeled_jump_rate({0, 1, 1}, 0, 1, Rat(1), Rat(-1), g),
                  InvalidSpec);  // negative rate from an over-packed target
}

TEST_CASE("reservoir rates") {
  CHECK(boundary_death_rate(0, Rat(1, 2)) == 0);
  CHECK(boundary_birth_rate(0, Rat(2), Rat(1, 2)) == 1);
  CHECK(boundary_death_rate(1, Rat(1, 2)) == 2);
  CHECK_THROWS_AS(boundary_birth_rate(0, Rat(2), Rat(1)), InvalidSpec);
  // Reversibility of the reservoir against its single-site measure:
  // b(k) w(k) = d(k+1) w(k+1) with w the unnormalized stationary weights.
  const Rat m(2), lambda(1, 2);
  auto weight = [&](long k) -> Rat {
    return rat_pow(lambda, k) * rising_factorial(m / 2, k) / factorial(k);
  };
  for (long k = 0; k <= 8; ++k)
    CHECK(boundary_birth_rate(k, m, lambda) * weight(k) ==
          boundary_death_rate(k + 1, lambda) * weight(k + 1));
  // The k=0 instance evaluates to 1/2 on both sides.
  CHECK(boundary_birth_rate(0, m, lambda) * weight(0) *
            rat_pow(1 - lambda, 1) ==
        Rat(1, 2));
}

TEST_CASE("apply_move") {
  CHECK(apply_move({2, 0}, 0, 1) == OccupationConfig{1, 1});
  CHECK(apply_move({1, 1}, 0, 1) == OccupationConfig{0, 2});
  CHECK(apply_move(apply_move({2, 0}, 0, 1), 1, 0) == OccupationConfig{2, 0});
  CHECK_THROWS_AS(apply_move({0, 1}, 0, 1), InvalidMove);
}

TEST_CASE("move enumeration: inclusion and exclusion") {
  SiteGraph g = two_sites();
  auto moves = enumerate_moves(ProcessSpec::sip(Rat(1)), g, {1, 0});
  REQUIRE(moves.size() == 1);
  CHECK(moves[0].to == OccupationConfig{0, 1});
  CHECK(moves[0].rate == 2);

  CHECK(enumerate_moves(ProcessSpec::sep(1), g, {1, 1}).empty());
  CHECK_THROWS_AS(enumerate_moves(ProcessSpec::sep(1), g, {2, 0}),
                  InvalidConfig);
}

TEST_CASE("move enumeration: boundary-driven chain") {
  auto spec = ProcessSpec::boundary_driven_sip(Rat(1), Rat(0), Rat(0), 2);
  SiteGraph chain = SiteGraph::chain(2);
  CHECK(enumerate_moves(spec, chain, {0, 0}).empty());  // closed at lambda=0

  auto driven = ProcessSpec::boundary_driven_sip(Rat(2), Rat(1, 2), Rat(1, 3), 2);
  auto moves = enumerate_moves(driven, chain, {1, 0});
  // bulk 1->2, death at left, birth at left, birth at right
  long total_changes = 0;
  for (const auto& mv : moves) {
    long delta = total_count(mv.to) - 1;
    CHECK(std::abs(delta) <= 1);
    total_changes += std::abs(delta);
  }
  CHECK(moves.size() == 4);
  CHECK(total_changes == 3);  // three reservoir moves, one bulk move

  // count changes of +-1 happen at the end sites only, bulk moves conserve
  auto wide = ProcessSpec::boundary_driven_sip(Rat(1), Rat(1, 3), Rat(2, 5), 4);
  SiteGraph chain4 = SiteGraph::chain(4);
  OccupationConfig eta = {1, 2, 0, 1};
  for (const auto& mv : enumerate_moves(wide, chain4, eta)) {
    const long delta = total_count(mv.to) - total_count(eta);
    if (delta == 0) continue;
    int changed = -1;
    for (int x = 0; x < 4; ++x)
      if (mv.to[x] != eta[x]) {
        CHECK(changed == -1);  // exactly one site moved
        changed = x;
      }
    CHECK((changed == 0 || changed == 3));
  }
}

TEST_CASE("conservation and positivity of enumerated moves") {
  Rng rng(7);
  SiteGraph g = SiteGraph::cycle(4);
  for (int trial = 0; trial < 50; ++trial) {
    OccupationConfig eta(4);
    for (auto& c : eta) c = static_cast<int>(rng.uniform_below(4));
    for (const auto& spec :
         {ProcessSpec::sip(Rat(7, 3)), ProcessSpec::irw(Rat(2)),
          ProcessSpec::generalized_ab(Rat(3), Rat(2))}) {
      for (const auto& mv : enumerate_moves(spec, g, eta)) {
        CHECK(mv.rate > 0);
        CHECK(total_count(mv.to) == total_count(eta));
      }
    }
  }
}

TEST_CASE("label consistency: labeled rates project to occupation rates") {
  Rng rng(11);
  SiteGraph g = SiteGraph::cycle(4);
  const Rat m(3, 2);
  for (int trial = 0; trial < 40; ++trial) {
    LabeledConfig pos(3);
    for (auto& p : pos) p = static_cast<int>(rng.uniform_below(4));
    OccupationConfig eta = occupation_of(pos, 4);
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) {
        if (x == y || g.p(x, y) == 0 || eta[x] == 0) continue;
        Rat labeled_total = 0;
        for (std::size_t i = 0; i < pos.size(); ++i)
          if (pos[i] == x)
            labeled_total += labeled_jump_rate(pos, static_cast<int>(i), y,
                                               2 * m, Rat(4), g);
        CHECK(labeled_total == sip_jump_rate(eta, x, y, m, g));
      }
  }
}

TEST_CASE("exclusion cap and pair-rate sign") {
  SiteGraph g = SiteGraph::cycle(4);
  Rng rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    LabeledConfig pos(3);
    for (auto& p : pos) p = static_cast<int>(rng.uniform_below(4));
    OccupationConfig eta = occupation_of(pos, 4);
    const long cap = 2;
    const bool capped_ok =
        *std::max_element(eta.begin(), eta.end()) <= cap;
    bool any_negative = false;
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (int y = 0; y < 4; ++y) {
        if (y == pos[i] || g.p(pos[i], y) == 0) continue;
        try {
          labeled_jump_rate(pos, static_cast<int>(i), y, Rat(cap), Rat(-1), g);
        } catch (const InvalidSpec&) {
          any_negative = true;
        }
      }
    // Rates stay nonnegative iff no site holds more than `cap` particles
    // (moves only look at target occupancy, which is at most the max).
    if (capped_ok) CHECK(!any_negative);
  }
}

TEST_CASE("inclusion rate is the sign-flipped exclusion form") {
  // 2 eta_x (m + 2 eta_y) p = 4 [eta_x (n - eta_y) p with n = m/2, minus -> plus]
  Rng rng(17);
  SiteGraph g = SiteGraph::cycle(3);
  for (int trial = 0; trial < 60; ++trial) {
    OccupationConfig eta(3);
    for (auto& c : eta) c = static_cast<int>(rng.uniform_below(5));
    const Rat m = frac(1 + static_cast<long>(rng.uniform_below(6)),
                       1 + static_cast<long>(rng.uniform_below(3)));
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) {
        if (x == y) continue;
        Rat sep_form_flipped = g.p(x, y) * eta[x] * (m / 2 + eta[y]);
        CHECK(sip_jump_rate(eta, x, y, m, g) == 4 * sep_form_flipped);
      }
  }
}

TEST_CASE("process spec validation") {
  CHECK_THROWS_AS(ProcessSpec::sip(Rat(0)), InvalidSpec);
  CHECK_THROWS_AS(ProcessSpec::sep(0), InvalidSpec);
  CHECK_THROWS_AS(ProcessSpec::generalized_ab(Rat(3), Rat(-2)), InvalidSpec);
  CHECK(ProcessSpec::generalized_ab(Rat(4), Rat(-2)).site_cap() == 2);
  CHECK_THROWS_AS(
      ProcessSpec::boundary_driven_sip(Rat(1), Rat(1), Rat(0), 3),
      InvalidSpec);
  CHECK(ProcessSpec::sip(Rat(3, 2)).pair_a() == 3);
  CHECK(ProcessSpec::sip(Rat(3, 2)).pair_b() == 4);
  CHECK(ProcessSpec::sep(2).pair_a() == 2);
  CHECK(ProcessSpec::sep(2).pair_b() == -1);
}
