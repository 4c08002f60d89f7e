#include "dualiscope/generator.hpp"

#include <algorithm>
#include <cmath>

#include "dualiscope/errors.hpp"

namespace dualiscope {

std::vector<int> GeneratorMatrix::absorbing_states() const {
  std::vector<int> out;
  for (int s = 0; s < state_count(); ++s)
    if (is_absorbing(s)) out.push_back(s);
  return out;
}

int GeneratorMatrix::state_index(const std::vector<int>& state) const {
  auto it = index.find(state);
  if (it == index.end()) throw InvalidConfig("state not in the generator");
  return it->second;
}

void GeneratorMatrix::add_state(std::vector<int> state) {
  index.emplace(state, state_count());
  states.push_back(std::move(state));
  rows.emplace_back();
  out_rate.emplace_back(0);
}

void GeneratorMatrix::add_rate(int from, const std::vector<int>& to,
                               const Rat& rate) {
  if (rate < 0) throw InvalidSpec("negative transition rate");
  if (rate == 0) return;
  auto it = index.find(to);
  if (it == index.end())
    throw InvalidConfig("transition target outside the state space");
  rows[from].push_back({it->second, rate});
  out_rate[from] += rate;
}

Rat GeneratorMatrix::rate(int from, int to) const {
  for (const auto& e : rows[from])
    if (e.to == to) return e.rate;
  return 0;
}

GeneratorMatrix build_labeled_generator(const SiteGraph& g, int n_particles,
                                        const Rat& a, const Rat& b) {
  if (n_particles < 1) throw InvalidSpec("need at least one particle");
  const int s = g.size();
  double space = std::pow(static_cast<double>(s), n_particles);
  if (space > static_cast<double>(kStateSpaceGuard))
    throw ResourceError("labeled state space exceeds the guard");

  long cap = 0;
  if (b < 0) {
    Rat ratio = a / -b;
    if (!is_integer(ratio) || ratio < 1)
      throw InvalidSpec("b < 0 requires a/(-b) to be a positive integer");
    cap = to_long(ratio);
  }

  GeneratorMatrix G;
  LabeledConfig tuple(n_particles, 0);
  while (true) {
    bool capped_out = false;
    if (cap > 0) {
      OccupationConfig occ = occupation_of(tuple, s);
      for (int c : occ)
        if (c > cap) capped_out = true;
    }
    if (!capped_out) G.add_state(tuple);
    int i = n_particles - 1;
    while (i >= 0 && tuple[i] == s - 1) tuple[i--] = 0;
    if (i < 0) break;
    ++tuple[i];
  }
  for (int idx = 0; idx < G.state_count(); ++idx) {
    for (const auto& move : enumerate_labeled_moves(g, a, b, G.states[idx]))
      G.add_rate(idx, move.to, move.rate);
  }
  return G;
}

GeneratorMatrix build_sector_generator(const ProcessSpec& spec,
                                       const SiteGraph& g, long total) {
  if (!spec.conservative())
    throw InvalidSpec("sector generators need a conservative process");
  const int cap = static_cast<int>(spec.site_cap());
  auto sector = enumerate_configs_exactly(g.size(), static_cast<int>(total),
                                          cap > 0 ? cap : -1);
  if (sector.empty())
    throw InvalidConfig("empty sector (cap too small for the particle count)");
  if (static_cast<long>(sector.size()) > kStateSpaceGuard)
    throw ResourceError("sector state space exceeds the guard");
  GeneratorMatrix G;
  for (auto& state : sector) G.add_state(std::move(state));
  for (int idx = 0; idx < G.state_count(); ++idx)
    for (const auto& move : enumerate_moves(spec, g, G.states[idx]))
      G.add_rate(idx, move.to, move.rate);
  return G;
}

GeneratorMatrix build_absorbing_dual_generator(int chain_length, const Rat& m,
                                               int n_particles) {
  if (n_particles < 1) throw InvalidSpec("need at least one dual particle");
  if (chain_length < 2) throw InvalidSpec("chain length must be >= 2");
  if (m <= 0) throw InvalidSpec("inclusion parameter m must be positive");
  auto states = enumerate_configs_exactly(chain_length + 2, n_particles);
  if (static_cast<long>(states.size()) > kStateSpaceGuard)
    throw ResourceError("dual state space exceeds the guard");
  // Absorbed count never decreases along transitions; sorting by it
  // descending makes the generator block-triangular.
  std::stable_sort(states.begin(), states.end(),
                   [](const std::vector<int>& lhs, const std::vector<int>& rhs) {
                     return lhs.front() + lhs.back() > rhs.front() + rhs.back();
                   });
  GeneratorMatrix G;
  for (auto& state : states) G.add_state(std::move(state));
  for (int idx = 0; idx < G.state_count(); ++idx)
    for (const auto& move : enumerate_absorbing_dual_moves(G.states[idx], m))
      G.add_rate(idx, move.to, move.rate);
  return G;
}

void dump_generator_csv(const GeneratorMatrix& G, std::ostream& os) {
  os << "from,to,rate\n";
  for (int s = 0; s < G.state_count(); ++s) {
    if (G.out_rate[s] != 0)
      os << s << "," << s << "," << rat_str(-G.out_rate[s]) << "\n";
    for (const auto& e : G.rows[s])
      os << s << "," << e.to << "," << rat_str(e.rate) << "\n";
  }
}

}  // namespace dualiscope
