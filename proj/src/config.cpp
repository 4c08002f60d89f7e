#include "dualiscope/config.hpp"

#include "dualiscope/errors.hpp"

namespace dualiscope {

long total_count(const OccupationConfig& eta) {
  long total = 0;
  for (int c : eta) {
    if (c < 0) throw InvalidConfig("negative occupation count");
    total += c;
  }
  return total;
}

OccupationConfig occupation_of(const LabeledConfig& positions, int n_sites) {
  OccupationConfig eta(n_sites, 0);
  for (int x : positions) {
    if (x < 0 || x >= n_sites)
      throw InvalidConfig("labeled particle off the site set");
    ++eta[x];
  }
  return eta;
}

namespace {

void enumerate_rec(int site, int sites, int remaining_max, int exact_total,
                   int per_site_cap, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
  if (site == sites) {
    if (exact_total < 0 || exact_total == 0) out.push_back(current);
    return;
  }
  int cap = remaining_max;
  if (exact_total >= 0) cap = exact_total;
  if (per_site_cap >= 0 && per_site_cap < cap) cap = per_site_cap;
  for (int c = 0; c <= cap; ++c) {
    current[site] = c;
    enumerate_rec(site + 1, sites, remaining_max - c,
                  exact_total < 0 ? -1 : exact_total - c, per_site_cap, current,
                  out);
  }
  current[site] = 0;
}

}  // namespace

std::vector<std::vector<int>> enumerate_configs_up_to(int sites, int max_total,
                                                      int per_site_cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(sites, 0);
  enumerate_rec(0, sites, max_total, -1, per_site_cap, current, out);
  return out;
}

std::vector<std::vector<int>> enumerate_configs_exactly(int sites, int total,
                                                        int per_site_cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(sites, 0);
  enumerate_rec(0, sites, total, total, per_site_cap, current, out);
  return out;
}

std::vector<std::vector<int>> enumerate_configs_boxed(int sites,
                                                      int max_per_site) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(sites, 0);
  long expect = 1;
  for (int i = 0; i < sites; ++i) expect *= (max_per_site + 1);
  out.reserve(expect);
  while (true) {
    out.push_back(current);
    int i = sites - 1;
    while (i >= 0 && current[i] == max_per_site) current[i--] = 0;
    if (i < 0) break;
    ++current[i];
  }
  return out;
}

}  // namespace dualiscope
