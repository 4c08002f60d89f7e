#pragma once

#include <string>
#include <vector>

#include "dualiscope/config.hpp"
#include "dualiscope/exact.hpp"
#include "dualiscope/graph.hpp"

namespace dualiscope {

// Which interacting particle system is being run. All conservative kinds
// share the labeled pair form: particle i jumps x_i -> y at rate
// p(x_i, y) (a + b #{j : x_j = y}).
//
//   inclusion SIP(m):   (a, b) = (2m, 4)
//   exclusion SEP(n):   (a, b) = (n, -1), at most n particles per site
//   independent walkers: (a, b) = (rate, 0)
//   generalized (a, b): b < 0 admitted only when a/(-b) is a positive
//                       integer (otherwise no Markov semigroup)
//
// The boundary-driven chain lives on {1..N} with nearest-neighbor bulk rates
// 2 eta_x (m + 2 eta_y) (edge coefficient 1, no kernel factor) plus
// birth/death at sites 1 and N tuned to the reservoir parameters.
struct ProcessSpec {
  enum class Kind { Sip, Sep, GeneralizedAB, Irw, BoundaryDrivenSip };

  Kind kind = Kind::Sip;
  Rat m;                 // Sip, BoundaryDrivenSip
  long cap = 0;          // Sep
  Rat gen_a, gen_b;      // GeneralizedAB
  Rat walk_rate;         // Irw
  Rat lambda_left, lambda_right;  // BoundaryDrivenSip
  int chain_length = 0;           // BoundaryDrivenSip

  static ProcessSpec sip(const Rat& m);
  static ProcessSpec sep(long n);
  static ProcessSpec generalized_ab(const Rat& a, const Rat& b);
  static ProcessSpec irw(const Rat& rate);
  static ProcessSpec boundary_driven_sip(const Rat& m, const Rat& lambda_left,
                                         const Rat& lambda_right, int n_sites);

  bool conservative() const { return kind != Kind::BoundaryDrivenSip; }
  // Labeled pair rates (conservative kinds only).
  Rat pair_a() const;
  Rat pair_b() const;
  // Per-site cap (0 = none).
  long site_cap() const;
  std::string name() const;

  void validate_state(const OccupationConfig& eta) const;
};

// Rate of moving one particle x -> y in the inclusion process:
// p(x,y) 2 eta_x (m + 2 eta_y).
Rat sip_jump_rate(const OccupationConfig& eta, int x, int y, const Rat& m,
                  const SiteGraph& g);

// Exclusion rate eta_x (n - eta_y) p(x,y); zero when the target is full.
Rat sep_jump_rate(const OccupationConfig& eta, int x, int y, long n,
                  const SiteGraph& g);

// Labeled pair rate p(x_i, y) (a + b #{j : x_j = y}).
Rat labeled_jump_rate(const LabeledConfig& positions, int i, int y,
                      const Rat& a, const Rat& b, const SiteGraph& g);

// Reservoir rates: b(k) = (m/2 + k) lambda/(1-lambda), d(k) = k/(1-lambda).
Rat boundary_birth_rate(long k, const Rat& m, const Rat& lambda);
Rat boundary_death_rate(long k, const Rat& lambda);

// eta with one particle moved x -> y; requires eta_x >= 1.
OccupationConfig apply_move(const OccupationConfig& eta, int x, int y);

struct Move {
  OccupationConfig to;
  Rat rate;
};

// Complete positive-rate transition list out of `state`. For the
// boundary-driven chain the graph argument fixes the chain length only;
// bulk rates use edge coefficient 1.
std::vector<Move> enumerate_moves(const ProcessSpec& spec, const SiteGraph& g,
                                  const OccupationConfig& state);

struct LabeledMove {
  LabeledConfig to;
  Rat rate;
};

std::vector<LabeledMove> enumerate_labeled_moves(const SiteGraph& g,
                                                 const Rat& a, const Rat& b,
                                                 const LabeledConfig& x);

// Moves of the dual of the boundary-driven chain. The dual configuration
// lives on {0..N+1}: inclusion bulk moves on {1..N} with edge coefficient 1,
// absorption 1 -> 0 at rate xi_1 and N -> N+1 at rate xi_N; absorbed
// particles are frozen.
std::vector<Move> enumerate_absorbing_dual_moves(const DualConfig& xi,
                                                 const Rat& m);

}  // namespace dualiscope
