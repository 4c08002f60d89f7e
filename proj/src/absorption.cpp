#include "dualiscope/absorption.hpp"

#include <queue>

#include "dualiscope/errors.hpp"

namespace dualiscope {

AbsorptionTable absorption_table(const GeneratorMatrix& G) {
  const int n = G.state_count();
  AbsorptionTable table;
  std::vector<int> transient;
  std::vector<int> local(n, -1);  // state -> transient position or ~absorbing
  for (int s = 0; s < n; ++s) {
    if (G.is_absorbing(s)) {
      local[s] = -static_cast<int>(table.absorbing.size()) - 2;
      table.absorbing.push_back(s);
    } else {
      local[s] = static_cast<int>(transient.size());
      transient.push_back(s);
    }
  }
  const int t_count = static_cast<int>(transient.size());
  const int a_count = static_cast<int>(table.absorbing.size());
  if (a_count == 0) throw InvalidConfig("no absorbing state in the chain");

  // Every transient state must reach an absorbing one (walk edges backward).
  {
    std::vector<std::vector<int>> reverse_adj(n);
    for (int s = 0; s < n; ++s)
      for (const auto& e : G.rows[s]) reverse_adj[e.to].push_back(s);
    std::vector<char> seen(n, 0);
    std::queue<int> frontier;
    for (int a : table.absorbing) {
      seen[a] = 1;
      frontier.push(a);
    }
    while (!frontier.empty()) {
      int s = frontier.front();
      frontier.pop();
      for (int prev : reverse_adj[s])
        if (!seen[prev]) {
          seen[prev] = 1;
          frontier.push(prev);
        }
    }
    for (int s = 0; s < n; ++s)
      if (!seen[s])
        throw InvalidConfig("non-absorbing closed class detected at state " +
                            std::to_string(s));
  }

  // M x = R with M the transient block of -G; M[i][i] = total out-rate,
  // M[i][j] = -rate(i -> j). Exact Gaussian elimination; M is a nonsingular
  // M-matrix so the pivots stay positive without row exchanges.
  std::vector<std::map<int, Rat>> M(t_count);
  std::vector<std::vector<Rat>> rhs(t_count, std::vector<Rat>(a_count, Rat(0)));
  for (int i = 0; i < t_count; ++i) {
    const int s = transient[i];
    M[i][i] = G.out_rate[s];
    for (const auto& e : G.rows[s]) {
      if (G.is_absorbing(e.to)) {
        rhs[i][-local[e.to] - 2] += e.rate;
      } else {
        M[i][local[e.to]] -= e.rate;
      }
    }
  }

  for (int col = 0; col < t_count; ++col) {
    const Rat pivot = M[col][col];
    if (pivot == 0)
      throw InvalidConfig("singular transient block in the absorption solve");
    for (int row = col + 1; row < t_count; ++row) {
      auto hit = M[row].find(col);
      if (hit == M[row].end()) continue;
      Rat factor = hit->second / pivot;
      M[row].erase(hit);
      for (auto it = M[col].upper_bound(col); it != M[col].end(); ++it) {
        Rat& cell = M[row][it->first];
        cell -= factor * it->second;
        if (cell == 0) M[row].erase(it->first);
      }
      for (int a = 0; a < a_count; ++a)
        if (rhs[col][a] != 0) rhs[row][a] -= factor * rhs[col][a];
    }
  }

  std::vector<std::vector<Rat>> solution(t_count,
                                         std::vector<Rat>(a_count, Rat(0)));
  for (int row = t_count - 1; row >= 0; --row) {
    for (int a = 0; a < a_count; ++a) {
      Rat acc = rhs[row][a];
      for (auto it = M[row].upper_bound(row); it != M[row].end(); ++it)
        acc -= it->second * solution[it->first][a];
      solution[row][a] = acc / M[row][row];
    }
  }

  table.probabilities.assign(n, std::vector<Rat>(a_count, Rat(0)));
  for (int a = 0; a < a_count; ++a)
    table.probabilities[table.absorbing[a]][a] = 1;
  for (int i = 0; i < t_count; ++i)
    table.probabilities[transient[i]] = std::move(solution[i]);
  return table;
}

std::map<int, Rat> absorption_distribution(const GeneratorMatrix& G,
                                           int start) {
  if (start < 0 || start >= G.state_count())
    throw InvalidConfig("start state out of range");
  AbsorptionTable table = absorption_table(G);
  std::map<int, Rat> out;
  for (std::size_t a = 0; a < table.absorbing.size(); ++a)
    out[table.absorbing[a]] = table.probabilities[start][a];
  return out;
}

Rat detailed_balance_violation(const GeneratorMatrix& G,
                               const std::vector<Rat>& weights) {
  if (static_cast<int>(weights.size()) != G.state_count())
    throw InvalidConfig("weight vector length mismatch");
  for (const Rat& w : weights)
    if (w <= 0) throw InvalidParameter("weights must be positive");
  Rat worst = 0;
  for (int s = 0; s < G.state_count(); ++s)
    for (const auto& e : G.rows[s]) {
      Rat gap = rat_abs(weights[s] * e.rate - weights[e.to] * G.rate(e.to, s));
      if (gap > worst) worst = gap;
    }
  return worst;
}

}  // namespace dualiscope
