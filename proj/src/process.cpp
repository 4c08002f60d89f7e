#include "dualiscope/process.hpp"

#include "dualiscope/errors.hpp"

namespace dualiscope {

ProcessSpec ProcessSpec::sip(const Rat& m) {
  if (m <= 0) throw InvalidSpec("SIP parameter m must be positive");
  ProcessSpec s;
  s.kind = Kind::Sip;
  s.m = m;
  return s;
}

ProcessSpec ProcessSpec::sep(long n) {
  if (n < 1) throw InvalidSpec("SEP cap n must be >= 1");
  ProcessSpec s;
  s.kind = Kind::Sep;
  s.cap = n;
  return s;
}

ProcessSpec ProcessSpec::generalized_ab(const Rat& a, const Rat& b) {
  if (a <= 0) throw InvalidSpec("generalized pair process needs a > 0");
  if (b < 0) {
    Rat ratio = a / -b;
    if (!is_integer(ratio) || ratio < 1)
      throw InvalidSpec(
          "b < 0 requires a/(-b) to be a positive integer; got a = " +
          rat_str(a) + ", b = " + rat_str(b));
  }
  ProcessSpec s;
  s.kind = Kind::GeneralizedAB;
  s.gen_a = a;
  s.gen_b = b;
  return s;
}

ProcessSpec ProcessSpec::irw(const Rat& rate) {
  if (rate <= 0) throw InvalidSpec("walker rate must be positive");
  ProcessSpec s;
  s.kind = Kind::Irw;
  s.walk_rate = rate;
  return s;
}

ProcessSpec ProcessSpec::boundary_driven_sip(const Rat& m,
                                             const Rat& lambda_left,
                                             const Rat& lambda_right,
                                             int n_sites) {
  if (m <= 0) throw InvalidSpec("boundary-driven chain needs m > 0");
  if (lambda_left < 0 || lambda_left >= 1 || lambda_right < 0 ||
      lambda_right >= 1)
    throw InvalidSpec("reservoir parameters must lie in [0, 1)");
  if (n_sites < 2) throw InvalidSpec("chain length must be >= 2");
  ProcessSpec s;
  s.kind = Kind::BoundaryDrivenSip;
  s.m = m;
  s.lambda_left = lambda_left;
  s.lambda_right = lambda_right;
  s.chain_length = n_sites;
  return s;
}

Rat ProcessSpec::pair_a() const {
  switch (kind) {
    case Kind::Sip:
      return 2 * m;
    case Kind::Sep:
      return Rat(cap);
    case Kind::GeneralizedAB:
      return gen_a;
    case Kind::Irw:
      return walk_rate;
    default:
      throw InvalidSpec("boundary-driven chain has no labeled pair form");
  }
}

Rat ProcessSpec::pair_b() const {
  switch (kind) {
    case Kind::Sip:
      return Rat(4);
    case Kind::Sep:
      return Rat(-1);
    case Kind::GeneralizedAB:
      return gen_b;
    case Kind::Irw:
      return Rat(0);
    default:
      throw InvalidSpec("boundary-driven chain has no labeled pair form");
  }
}

long ProcessSpec::site_cap() const {
  if (kind == Kind::Sep) return cap;
  if (kind == Kind::GeneralizedAB && gen_b < 0) return to_long(gen_a / -gen_b);
  return 0;
}

std::string ProcessSpec::name() const {
  switch (kind) {
    case Kind::Sip:
      return "SIP(" + rat_str(m) + ")";
    case Kind::Sep:
      return "SEP(" + std::to_string(cap) + ")";
    case Kind::GeneralizedAB:
      return "AB(" + rat_str(gen_a) + "," + rat_str(gen_b) + ")";
    case Kind::Irw:
      return "IRW(" + rat_str(walk_rate) + ")";
    case Kind::BoundaryDrivenSip:
      return "BoundaryDrivenSIP(" + rat_str(m) + "," + rat_str(lambda_left) +
             "," + rat_str(lambda_right) + ",N=" + std::to_string(chain_length) +
             ")";
  }
  return "?";
}

void ProcessSpec::validate_state(const OccupationConfig& eta) const {
  for (int c : eta)
    if (c < 0) throw InvalidConfig("negative occupation count");
  long per_site = site_cap();
  if (per_site > 0)
    for (std::size_t x = 0; x < eta.size(); ++x)
      if (eta[x] > per_site)
        throw InvalidConfig("occupancy " + std::to_string(eta[x]) +
                            " above cap " + std::to_string(per_site) +
                            " at site " + std::to_string(x));
  if (kind == Kind::BoundaryDrivenSip &&
      static_cast<int>(eta.size()) != chain_length)
    throw InvalidConfig("state length does not match chain length");
}

Rat sip_jump_rate(const OccupationConfig& eta, int x, int y, const Rat& m,
                  const SiteGraph& g) {
  if (x == y) throw InvalidMove("jump needs distinct sites");
  if (eta[x] == 0) return 0;
  return g.p(x, y) * 2 * eta[x] * (m + 2 * eta[y]);
}

Rat sep_jump_rate(const OccupationConfig& eta, int x, int y, long n,
                  const SiteGraph& g) {
  if (x == y) throw InvalidMove("jump needs distinct sites");
  if (eta[x] > n || eta[y] > n)
    throw InvalidConfig("occupancy above the exclusion cap");
  return g.p(x, y) * eta[x] * (n - eta[y]);
}

Rat labeled_jump_rate(const LabeledConfig& positions, int i, int y,
                      const Rat& a, const Rat& b, const SiteGraph& g) {
  if (positions[i] == y) throw InvalidMove("jump needs a distinct target site");
  int occupants = 0;
  for (int pos : positions)
    if (pos == y) ++occupants;
  Rat rate = g.p(positions[i], y) * (a + b * occupants);
  if (rate < 0)
    throw InvalidSpec("negative jump rate; pair parameters (" + rat_str(a) +
                      "," + rat_str(b) + ") invalid at occupancy " +
                      std::to_string(occupants));
  return rate;
}

Rat boundary_birth_rate(long k, const Rat& m, const Rat& lambda) {
  if (k < 0) throw InvalidParameter("negative occupancy");
  if (lambda < 0 || lambda >= 1)
    throw InvalidSpec("reservoir parameter must lie in [0, 1)");
  return (m / 2 + k) * lambda / (1 - lambda);
}

Rat boundary_death_rate(long k, const Rat& lambda) {
  if (k < 0) throw InvalidParameter("negative occupancy");
  if (lambda < 0 || lambda >= 1)
    throw InvalidSpec("reservoir parameter must lie in [0, 1)");
  return Rat(k) / (1 - lambda);
}

OccupationConfig apply_move(const OccupationConfig& eta, int x, int y) {
  if (eta[x] < 1) throw InvalidMove("no particle to move at the source site");
  OccupationConfig out = eta;
  --out[x];
  ++out[y];
  return out;
}

std::vector<Move> enumerate_moves(const ProcessSpec& spec, const SiteGraph& g,
                                  const OccupationConfig& state) {
  spec.validate_state(state);
  std::vector<Move> moves;
  if (spec.conservative()) {
    const Rat a = spec.pair_a();
    const Rat b = spec.pair_b();
    const int n = g.size();
    if (static_cast<int>(state.size()) != n)
      throw InvalidConfig("state length does not match the graph");
    for (int x = 0; x < n; ++x) {
      if (state[x] == 0) continue;
      for (int y = 0; y < n; ++y) {
        if (y == x || g.p(x, y) == 0) continue;
        Rat rate = g.p(x, y) * state[x] * (a + b * state[y]);
        if (rate > 0) moves.push_back({apply_move(state, x, y), rate});
      }
    }
    return moves;
  }

  // Boundary-driven chain: nearest-neighbor bulk with edge coefficient 1,
  // reservoirs at both ends.
  const int n = spec.chain_length;
  for (int x = 0; x + 1 < n; ++x) {
    if (state[x] > 0) {
      Rat rate = 2 * state[x] * (spec.m + 2 * state[x + 1]);
      if (rate > 0) moves.push_back({apply_move(state, x, x + 1), rate});
    }
    if (state[x + 1] > 0) {
      Rat rate = 2 * state[x + 1] * (spec.m + 2 * state[x]);
      if (rate > 0) moves.push_back({apply_move(state, x + 1, x), rate});
    }
  }
  auto with_delta = [&state](int site, int delta) {
    OccupationConfig out = state;
    out[site] += delta;
    return out;
  };
  Rat birth_l = boundary_birth_rate(state[0], spec.m, spec.lambda_left);
  if (birth_l > 0) moves.push_back({with_delta(0, +1), birth_l});
  Rat death_l = boundary_death_rate(state[0], spec.lambda_left);
  if (death_l > 0) moves.push_back({with_delta(0, -1), death_l});
  Rat birth_r = boundary_birth_rate(state[n - 1], spec.m, spec.lambda_right);
  if (birth_r > 0) moves.push_back({with_delta(n - 1, +1), birth_r});
  Rat death_r = boundary_death_rate(state[n - 1], spec.lambda_right);
  if (death_r > 0) moves.push_back({with_delta(n - 1, -1), death_r});
  return moves;
}

std::vector<LabeledMove> enumerate_labeled_moves(const SiteGraph& g,
                                                 const Rat& a, const Rat& b,
                                                 const LabeledConfig& x) {
  std::vector<LabeledMove> moves;
  const int n_sites = g.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int y = 0; y < n_sites; ++y) {
      if (y == x[i] || g.p(x[i], y) == 0) continue;
      Rat rate = labeled_jump_rate(x, static_cast<int>(i), y, a, b, g);
      if (rate > 0) {
        LabeledConfig to = x;
        to[i] = y;
        moves.push_back({std::move(to), std::move(rate)});
      }
    }
  }
  return moves;
}

std::vector<Move> enumerate_absorbing_dual_moves(const DualConfig& xi,
                                                 const Rat& m) {
  const int n = static_cast<int>(xi.size());  // sites 0..N+1
  if (n < 4) throw InvalidConfig("absorbing dual needs at least 4 sites");
  const int last_bulk = n - 2;  // site N
  std::vector<Move> moves;
  for (int x = 1; x + 1 <= last_bulk; ++x) {
    if (xi[x] > 0)
      moves.push_back({apply_move(xi, x, x + 1), 2 * xi[x] * (m + 2 * xi[x + 1])});
    if (xi[x + 1] > 0)
      moves.push_back({apply_move(xi, x + 1, x), 2 * xi[x + 1] * (m + 2 * xi[x])});
  }
  if (xi[1] > 0) moves.push_back({apply_move(xi, 1, 0), Rat(xi[1])});
  if (xi[last_bulk] > 0)
    moves.push_back({apply_move(xi, last_bulk, last_bulk + 1), Rat(xi[last_bulk])});
  return moves;
}

}  // namespace dualiscope
