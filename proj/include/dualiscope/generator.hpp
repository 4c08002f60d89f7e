#pragma once

#include <map>
#include <ostream>
#include <vector>

#include "dualiscope/exact.hpp"
#include "dualiscope/graph.hpp"
#include "dualiscope/process.hpp"

namespace dualiscope {

inline constexpr long kStateSpaceGuard = 1'000'000;

// Sparse rate matrix of a finite continuous-time Markov chain. Off-diagonal
// entries are the exact transition rates; the diagonal is implicit,
// -out_rate[s], so row sums are exactly zero by construction. States with
// no outgoing transition are absorbing.
struct GeneratorMatrix {
  std::vector<std::vector<int>> states;
  std::map<std::vector<int>, int> index;

  struct Entry {
    int to;
    Rat rate;
  };
  std::vector<std::vector<Entry>> rows;
  std::vector<Rat> out_rate;

  int state_count() const { return static_cast<int>(states.size()); }
  bool is_absorbing(int s) const { return rows[s].empty(); }
  std::vector<int> absorbing_states() const;
  int state_index(const std::vector<int>& state) const;  // throws if unknown

  void add_state(std::vector<int> state);
  void add_rate(int from, const std::vector<int>& to, const Rat& rate);
  // Exact off-diagonal entry (0 when absent).
  Rat rate(int from, int to) const;
};

// Labeled pair-interaction generator on S^n (or on the capped tuple space
// when b < 0, where the full space has negative rates). Guard: state count
// <= kStateSpaceGuard.
GeneratorMatrix build_labeled_generator(const SiteGraph& g, int n_particles,
                                        const Rat& a, const Rat& b);

// Conservative occupation generator restricted to the sector |eta| = total.
GeneratorMatrix build_sector_generator(const ProcessSpec& spec,
                                       const SiteGraph& g, long total);

// Dual of the boundary-driven chain: inclusion bulk on {1..N} (edge
// coefficient 1) with absorption into sites 0 and N+1 at per-particle
// rate 1. States ordered by descending absorbed count so the absorption
// solve's elimination stays block-local.
GeneratorMatrix build_absorbing_dual_generator(int chain_length, const Rat& m,
                                               int n_particles);

// Sparse triplet dump (from,to,rate), diagonal included, for debugging.
void dump_generator_csv(const GeneratorMatrix& G, std::ostream& os);

}  // namespace dualiscope
