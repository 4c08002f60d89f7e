#pragma once

#include <map>
#include <vector>

#include "dualiscope/generator.hpp"

namespace dualiscope {

// Exact absorption probabilities for every start state at once:
// probabilities[s][j] = P(chain started at s is absorbed in
// absorbing[j]). Rows of absorbing states are point masses. Computed by
// exact rational Gaussian elimination on the transient block of -G
// (a nonsingular M-matrix, so no pivoting is needed).
struct AbsorptionTable {
  std::vector<int> absorbing;
  std::vector<std::vector<Rat>> probabilities;
};

AbsorptionTable absorption_table(const GeneratorMatrix& G);

// Distribution over absorbing states from one start (map keyed by state
// index). Throws InvalidConfig when some transient state cannot reach an
// absorbing state.
std::map<int, Rat> absorption_distribution(const GeneratorMatrix& G,
                                           int start);

// Max over transitions of |w(s) G(s,s') - w(s') G(s',s)|; exactly zero
// certifies reversibility of G with respect to the weights.
Rat detailed_balance_violation(const GeneratorMatrix& G,
                               const std::vector<Rat>& weights);

}  // namespace dualiscope
