#include "dualiscope/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "dualiscope/duality.hpp"
#include "dualiscope/errors.hpp"
#include "dualiscope/parallel.hpp"

namespace dualiscope {

namespace {

// One Gillespie step: returns the holding time and writes the next state,
// or returns a negative holding time when the state is frozen.
template <typename MoveList>
double gillespie_step(const MoveList& moves, Rng& rng, int* chosen) {
  double total = 0;
  for (const auto& move : moves) total += to_double(move.rate);
  if (total <= 0) return -1;
  const double hold = rng.exponential() / total;
  double mark = rng.uniform() * total;
  int pick = 0;
  const int last = static_cast<int>(moves.size()) - 1;
  for (; pick < last; ++pick) {
    mark -= to_double(moves[pick].rate);
    if (mark <= 0) break;
  }
  *chosen = pick;
  return hold;
}

}  // namespace

JumpTrajectory simulate_ctmc(const ProcessSpec& spec, const SiteGraph& g,
                             OccupationConfig start, double horizon, Rng& rng,
                             bool record_path) {
  if (horizon < 0) throw InvalidParameter("negative horizon");
  spec.validate_state(start);
  JumpTrajectory traj;
  traj.times.push_back(0);
  traj.states.push_back(start);
  double now = 0;
  OccupationConfig state = std::move(start);
  while (true) {
    auto moves = enumerate_moves(spec, g, state);
    int chosen = -1;
    const double hold = gillespie_step(moves, rng, &chosen);
    if (hold < 0) break;
    if (now + hold > horizon) break;
    now += hold;
    state = moves[chosen].to;
    ++traj.jump_count;
    if (!spec.conservative() && total_count(state) > kOccupancyGuard)
      throw ResourceError("occupancy guard exceeded on the driven chain");
    if (record_path) {
      traj.times.push_back(now);
      traj.states.push_back(state);
    }
  }
  if (!record_path || traj.times.back() != horizon) {
    traj.times.push_back(horizon);
    traj.states.push_back(state);
  }
  return traj;
}

JumpTrajectory simulate_labeled(const SiteGraph& g, const Rat& a, const Rat& b,
                                LabeledConfig start, double horizon, Rng& rng,
                                bool record_path) {
  if (horizon < 0) throw InvalidParameter("negative horizon");
  JumpTrajectory traj;
  traj.times.push_back(0);
  traj.states.push_back(start);
  double now = 0;
  LabeledConfig state = std::move(start);
  while (true) {
    auto moves = enumerate_labeled_moves(g, a, b, state);
    int chosen = -1;
    const double hold = gillespie_step(moves, rng, &chosen);
    if (hold < 0) break;
    if (now + hold > horizon) break;
    now += hold;
    state = moves[chosen].to;
    ++traj.jump_count;
    if (record_path) {
      traj.times.push_back(now);
      traj.states.push_back(state);
    }
  }
  if (!record_path || traj.times.back() != horizon) {
    traj.times.push_back(horizon);
    traj.states.push_back(state);
  }
  return traj;
}

namespace {

// Edge order for one splitting window: a fresh uniform shuffle per window.
std::vector<int> shuffled_edges(std::size_t n_edges, Rng& rng) {
  std::vector<int> order(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i) order[i] = static_cast<int>(i);
  for (std::size_t i = n_edges; i > 1; --i) {
    std::size_t j = rng.uniform_below(i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

}  // namespace

DiffusionTrajectory simulate_bmp(const SiteGraph& g, std::vector<double> start,
                                 double horizon, double dt, Rng& rng) {
  if (dt <= 0) throw InvalidParameter("time step must be positive");
  if (horizon < 0) throw InvalidParameter("negative horizon");
  if (static_cast<int>(start.size()) != g.size())
    throw InvalidConfig("state length does not match the graph");
  DiffusionTrajectory traj;
  traj.times.push_back(0);
  traj.states.push_back(start);
  const auto& edges = g.edges();
  double now = 0;
  while (now + dt <= horizon + 1e-12 * horizon) {
    for (int e : shuffled_edges(edges.size(), rng)) {
      auto [x, y] = edges[e];
      const double angle =
          rng.normal() * std::sqrt(2.0 * g.p_d(x, y) * dt);
      const double c = std::cos(angle), s = std::sin(angle);
      const double nx = c * start[x] + s * start[y];
      const double ny = -s * start[x] + c * start[y];
      start[x] = nx;
      start[y] = ny;
    }
    now += dt;
    traj.times.push_back(now);
    traj.states.push_back(start);
  }
  return traj;
}

namespace {

// Energies live on the grid q Z with q = 2^-30. Multiples of q up to 2^22
// are exactly representable, so grid-snapped transfers apply to both sites
// of an edge without rounding and the total is conserved exactly in real
// arithmetic. The snap bias (at most q/2 per edge step) is far below the
// scheme's O(dt) weak error.
constexpr double kEnergyGrid = 0x1.0p-30;
constexpr double kEnergyCap = 0x1.0p22;

double snap_to_grid(double v) {
  return std::nearbyint(v / kEnergyGrid) * kEnergyGrid;
}

}  // namespace

DiffusionTrajectory simulate_bep(const SiteGraph& g, std::vector<double> start,
                                 const Rat& m, double horizon, double dt,
                                 Rng& rng) {
  if (dt <= 0) throw InvalidParameter("time step must be positive");
  if (horizon < 0) throw InvalidParameter("negative horizon");
  if (static_cast<int>(start.size()) != g.size())
    throw InvalidConfig("state length does not match the graph");
  double total_energy = 0;
  for (double& v : start) {
    if (v < 0) throw InvalidConfig("energies must be nonnegative");
    v = snap_to_grid(v);
    total_energy += v;
  }
  // The total is conserved, so this bounds every site for the whole run,
  // keeping all grid multiples exactly representable.
  if (total_energy > kEnergyCap)
    throw ResourceError("total energy above the grid cap");
  const double m_d = to_double(m);
  DiffusionTrajectory traj;
  traj.times.push_back(0);
  traj.states.push_back(start);
  const auto& edges = g.edges();
  double now = 0;
  while (now + dt <= horizon + 1e-12 * horizon) {
    for (int e : shuffled_edges(edges.size(), rng)) {
      auto [x, y] = edges[e];
      const double p = g.p_d(x, y);
      double delta = -2.0 * m_d * (start[x] - start[y]) * p * dt +
                     std::sqrt(8.0 * start[x] * start[y] * p * dt) *
                         rng.normal();
      delta = snap_to_grid(delta);
      // Clamp into [-eta_x, eta_y] so both sites stay nonnegative; the
      // bounds are grid points themselves.
      if (start[x] + delta < 0) {
        delta = -start[x];
        ++traj.clamped_steps;
      } else if (start[y] - delta < 0) {
        delta = start[y];
        ++traj.clamped_steps;
      }
      start[x] += delta;
      start[y] -= delta;
    }
    now += dt;
    traj.times.push_back(now);
    traj.states.push_back(start);
  }
  return traj;
}

Estimate estimate_duality_moment(const ProcessSpec& spec, const SiteGraph& g,
                                 const ProductMeasureSpec& measure,
                                 const DualConfig& xi, double t, long replicas,
                                 std::uint64_t master_seed, int jobs) {
  if (replicas < 2) throw InvalidParameter("need at least 2 replicas");
  if (spec.kind != ProcessSpec::Kind::Sip && spec.kind != ProcessSpec::Kind::Sep)
    throw InvalidPairing("duality-moment estimation needs SIP or SEP");
  if ((spec.kind == ProcessSpec::Kind::Sip &&
       measure.family != ProductMeasureSpec::Family::DiscreteGamma) ||
      (spec.kind == ProcessSpec::Kind::Sep &&
       measure.family != ProductMeasureSpec::Family::Binomial))
    throw InvalidPairing("measure family does not match the process");

  std::vector<double> values(replicas);
  jobs = resolve_jobs(jobs);
  // Exceptions must not unwind across the parallel region; capture the
  // first one and rethrow after the join.
  std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(jobs)
#endif
  for (long r = 0; r < replicas; ++r) {
    try {
      Rng rng(seed_stream(master_seed, static_cast<std::uint64_t>(r)));
      OccupationConfig eta0 = sample_occupation(measure, rng);
      auto traj = simulate_ctmc(spec, g, std::move(eta0), t, rng, false);
      values[r] = to_double(duality_product(xi, traj.final_state(), spec));
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
      values[r] = 0;
    }
  }
  if (failure) std::rethrow_exception(failure);

  // Fixed-order aggregation keeps the estimate identical across jobs values.
  double mean = 0;
  for (long r = 0; r < replicas; ++r) mean += values[r];
  mean /= static_cast<double>(replicas);
  double ss = 0;
  for (long r = 0; r < replicas; ++r) {
    const double d = values[r] - mean;
    ss += d * d;
  }
  Estimate est;
  est.mean = mean;
  est.stderr_of_mean =
      std::sqrt(ss / (replicas - 1)) / std::sqrt(static_cast<double>(replicas));
  est.replicas = replicas;
  est.seed = master_seed;
  return est;
}

Estimate stationary_time_average(
    const ProcessSpec& boundary_spec,
    const std::function<double(const OccupationConfig&)>& observable,
    double burn_in, double horizon, std::uint64_t seed, long batches) {
  if (boundary_spec.kind != ProcessSpec::Kind::BoundaryDrivenSip)
    throw InvalidPairing("time averages are for the boundary-driven chain");
  if (horizon <= burn_in)
    throw InvalidParameter("horizon must exceed the burn-in");
  if (batches < 2) throw InvalidParameter("need at least 2 batches");

  Rng rng(seed);
  const SiteGraph chain = SiteGraph::chain(boundary_spec.chain_length);
  OccupationConfig state(boundary_spec.chain_length, 0);
  double now = 0;
  const double batch_span = (horizon - burn_in) / static_cast<double>(batches);
  std::vector<double> batch_sums(batches, 0.0);

  auto deposit = [&](double from, double to, double value) {
    // Spread value * dt across the batch grid.
    double left = std::max(from, burn_in);
    while (left < to) {
      const long b = std::min<long>(
          batches - 1,
          static_cast<long>((left - burn_in) / batch_span));
      const double right = std::min(to, burn_in + (b + 1) * batch_span);
      batch_sums[b] += value * (right - left);
      left = right;
    }
  };

  while (now < horizon) {
    auto moves = enumerate_moves(boundary_spec, chain, state);
    int chosen = -1;
    const double hold = gillespie_step(moves, rng, &chosen);
    const double next = hold < 0 ? horizon : std::min(horizon, now + hold);
    if (next > burn_in) deposit(now, next, observable(state));
    if (hold < 0 || now + hold > horizon) break;
    now = next;
    state = moves[chosen].to;
    if (total_count(state) > kOccupancyGuard)
      throw ResourceError("occupancy guard exceeded on the driven chain");
  }

  double mean = 0;
  for (double s : batch_sums) mean += s;
  mean /= (horizon - burn_in);
  double ss = 0;
  for (double s : batch_sums) {
    const double batch_mean = s / batch_span;
    ss += (batch_mean - mean) * (batch_mean - mean);
  }
  Estimate est;
  est.mean = mean;
  est.stderr_of_mean = std::sqrt(ss / (batches - 1)) /
                       std::sqrt(static_cast<double>(batches));
  est.replicas = batches;
  est.seed = seed;
  return est;
}

}  // namespace dualiscope
