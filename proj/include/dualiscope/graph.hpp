#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dualiscope/exact.hpp"

namespace dualiscope {

// Finite site set with a symmetric jump kernel p(x,y).
//
// Hard requirements (enforced on construction): square kernel, nonnegative
// entries, zero diagonal, symmetry, connectivity of {p > 0}. Row sums equal
// to 1 are part of the model's random-walk reading and are reported by
// validate_kernel, but the engines only need symmetry: on an open path of
// three or more sites no symmetric zero-diagonal kernel has all row sums 1,
// and every identity checked here holds for general symmetric rates.
struct SiteGraph {
  std::vector<std::string> sites;
  std::vector<std::vector<Rat>> kernel;

  SiteGraph() = default;
  SiteGraph(std::vector<std::string> names, std::vector<std::vector<Rat>> p);

  int size() const { return static_cast<int>(sites.size()); }
  const Rat& p(int x, int y) const { return kernel[x][y]; }
  double p_d(int x, int y) const { return kernel_d[x][y]; }

  // Unordered pairs {x,y} with x < y and p(x,y) > 0.
  const std::vector<std::pair<int, int>>& edges() const { return edge_list; }

  int site_index(const std::string& name) const;  // -1 when absent

  // Open chain, p = 1/2 on each edge (end rows sum to 1/2).
  static SiteGraph chain(int n);
  // Cycle, p = 1/2 per neighbor; n = 3 is the triangle. Doubly stochastic.
  static SiteGraph cycle(int n);
  // Complete graph, p = 1/(n-1) off-diagonal. Doubly stochastic.
  static SiteGraph complete(int n);

 private:
  std::vector<std::vector<double>> kernel_d;
  std::vector<std::pair<int, int>> edge_list;
  void finish_construction();
};

// Returns one human-readable line per violated kernel invariant
// (symmetry, zero diagonal, nonnegativity, row sums 1, connectivity).
// Empty list iff the kernel is a valid symmetric random-walk kernel.
std::vector<std::string> validate_kernel(const SiteGraph& g);

// True when the only violations are row sums != 1 (acceptable to the
// engines, flagged as warnings by the CLI).
bool violations_are_row_sums_only(const std::vector<std::string>& violations);

}  // namespace dualiscope
