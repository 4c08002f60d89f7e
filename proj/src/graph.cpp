#include "dualiscope/graph.hpp"

#include <queue>

#include "dualiscope/errors.hpp"

namespace dualiscope {

SiteGraph::SiteGraph(std::vector<std::string> names,
                     std::vector<std::vector<Rat>> p)
    : sites(std::move(names)), kernel(std::move(p)) {
  const auto n = sites.size();
  if (kernel.size() != n)
    throw InvalidConfig("kernel row count does not match site count");
  for (const auto& row : kernel)
    if (row.size() != n)
      throw InvalidConfig("kernel is not square");
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (kernel[x][y] < 0)
        throw InvalidConfig("negative kernel entry at (" + sites[x] + "," +
                            sites[y] + ")");
  finish_construction();
}

void SiteGraph::finish_construction() {
  const int n = size();
  kernel_d.assign(n, std::vector<double>(n, 0.0));
  edge_list.clear();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      kernel_d[x][y] = to_double(kernel[x][y]);
      if (x < y && kernel[x][y] > 0) edge_list.emplace_back(x, y);
    }
}

int SiteGraph::site_index(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (sites[i] == name) return i;
  return -1;
}

namespace {

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return names;
}

}  // namespace

SiteGraph SiteGraph::chain(int n) {
  if (n < 2) throw InvalidConfig("chain needs at least 2 sites");
  std::vector<std::vector<Rat>> p(n, std::vector<Rat>(n, Rat(0)));
  const Rat half(1, 2);
  for (int i = 0; i + 1 < n; ++i) {
    p[i][i + 1] = n == 2 ? Rat(1) : half;
    p[i + 1][i] = p[i][i + 1];
  }
  return SiteGraph(default_names(n), std::move(p));
}

SiteGraph SiteGraph::cycle(int n) {
  if (n < 3) throw InvalidConfig("cycle needs at least 3 sites");
  std::vector<std::vector<Rat>> p(n, std::vector<Rat>(n, Rat(0)));
  const Rat half(1, 2);
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    p[i][j] += half;
    p[j][i] += half;
  }
  return SiteGraph(default_names(n), std::move(p));
}

SiteGraph SiteGraph::complete(int n) {
  if (n < 2) throw InvalidConfig("complete graph needs at least 2 sites");
  std::vector<std::vector<Rat>> p(n, std::vector<Rat>(n, Rat(0)));
  const Rat w(1, n - 1);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y) p[x][y] = w;
  return SiteGraph(default_names(n), std::move(p));
}

std::vector<std::string> validate_kernel(const SiteGraph& g) {
  std::vector<std::string> violations;
  const int n = g.size();
  for (int x = 0; x < n; ++x) {
    if (g.p(x, x) != 0)
      violations.push_back("diagonal violation at " + g.sites[x] + ": p(x,x) = " +
                           rat_str(g.p(x, x)));
    Rat row_sum = 0;
    for (int y = 0; y < n; ++y) {
      if (g.p(x, y) < 0)
        violations.push_back("negative entry at (" + g.sites[x] + "," +
                             g.sites[y] + ")");
      if (y > x && g.p(x, y) != g.p(y, x))
        violations.push_back("symmetry violation at (" + g.sites[x] + "," +
                             g.sites[y] + "): " + rat_str(g.p(x, y)) + " vs " +
                             rat_str(g.p(y, x)));
      row_sum += g.p(x, y);
    }
    if (row_sum != 1)
      violations.push_back("row sum violation at " + g.sites[x] + ": sum = " +
                           rat_str(row_sum));
  }
  // Connectivity of the support graph.
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    int x = frontier.front();
    frontier.pop();
    for (int y = 0; y < n; ++y)
      if (!seen[y] && (g.p(x, y) > 0 || g.p(y, x) > 0)) {
        seen[y] = 1;
        ++reached;
        frontier.push(y);
      }
  }
  if (reached != n)
    violations.push_back("support graph is not connected (" +
                         std::to_string(reached) + " of " + std::to_string(n) +
                         " sites reachable)");
  return violations;
}

bool violations_are_row_sums_only(const std::vector<std::string>& violations) {
  for (const auto& v : violations)
    if (v.find("row sum violation") == std::string::npos) return false;
  return true;
}

}  // namespace dualiscope
