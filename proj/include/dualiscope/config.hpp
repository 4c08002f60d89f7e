#pragma once

#include <vector>

namespace dualiscope {

// Unlabeled occupation vector eta, one count per site.
using OccupationConfig = std::vector<int>;
// Ordered particle positions (x_1, ..., x_n).
using LabeledConfig = std::vector<int>;
// Dual particle configuration xi (same representation as an occupation
// vector; for the boundary chain its sites run over {0, ..., N+1}).
using DualConfig = std::vector<int>;

long total_count(const OccupationConfig& eta);

// Projection Sigma_i I(x_i = x).
OccupationConfig occupation_of(const LabeledConfig& positions, int n_sites);

// All configurations on `sites` sites with total in [0, max_total]
// (per-site cap optional, -1 = none), in a fixed deterministic order.
std::vector<std::vector<int>> enumerate_configs_up_to(int sites, int max_total,
                                                      int per_site_cap = -1);
// Total exactly `total`.
std::vector<std::vector<int>> enumerate_configs_exactly(int sites, int total,
                                                        int per_site_cap = -1);
// All configurations with each count in [0, max_per_site].
std::vector<std::vector<int>> enumerate_configs_boxed(int sites,
                                                      int max_per_site);

}  // namespace dualiscope
