#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dualiscope/config.hpp"
#include "dualiscope/graph.hpp"
#include "dualiscope/measures.hpp"
#include "dualiscope/process.hpp"
#include "dualiscope/rng.hpp"

namespace dualiscope {

// Exact-law jump trajectory (Gillespie direct method): exponential holding
// times at the total rate, jump picked proportionally to the rates.
struct JumpTrajectory {
  std::vector<double> times;
  std::vector<std::vector<int>> states;
  long jump_count = 0;
  const std::vector<int>& final_state() const { return states.back(); }
  long jumps() const { return jump_count; }
};

// Occupancy guard for the boundary-driven chain (birth rates grow with the
// occupancy, so runaway states abort instead of spinning).
inline constexpr long kOccupancyGuard = 1'000'000;

JumpTrajectory simulate_ctmc(const ProcessSpec& spec, const SiteGraph& g,
                             OccupationConfig start, double horizon, Rng& rng,
                             bool record_path = true);

JumpTrajectory simulate_labeled(const SiteGraph& g, const Rat& a, const Rat& b,
                                LabeledConfig start, double horizon, Rng& rng,
                                bool record_path = true);

struct DiffusionTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  long clamped_steps = 0;  // energy process only
  const std::vector<double>& final_state() const { return states.back(); }
};

// Momentum diffusion by edge-wise exact rotations: each window of length dt
// sweeps the edges in random order and rotates (eta_x, eta_y) by a centered
// Gaussian angle of variance 2 p(x,y) dt. Conserves sum eta^2 exactly per
// rotation up to roundoff; weak error O(dt) from the edge splitting.
DiffusionTrajectory simulate_bmp(const SiteGraph& g, std::vector<double> start,
                                 double horizon, double dt, Rng& rng);

// Energy diffusion by Euler-Maruyama on each edge's difference coordinate:
// transfer delta = -2m (eta_x - eta_y) p dt + sqrt(8 eta_x eta_y p dt) N.
// Energies live on the binary grid 2^-30 Z (total capped at 2^22), so the
// antisymmetric transfer applies to both sites without rounding and sum eta
// is conserved exactly in real arithmetic. Steps into negative territory are
// clamped to the boundary and counted.
DiffusionTrajectory simulate_bep(const SiteGraph& g, std::vector<double> start,
                                 const Rat& m, double horizon, double dt,
                                 Rng& rng);

struct Estimate {
  double mean = 0;
  double stderr_of_mean = 0;
  long replicas = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of the time-evolved duality moment: sample the
// initial configuration from the product measure, run the jump process to
// time t, average D(xi, eta_t). Replicas are embarrassingly parallel with
// per-replica seed streams; aggregation is in fixed replica order, so the
// result is identical for every jobs value.
Estimate estimate_duality_moment(const ProcessSpec& spec, const SiteGraph& g,
                                 const ProductMeasureSpec& measure,
                                 const DualConfig& xi, double t, long replicas,
                                 std::uint64_t master_seed, int jobs = 0);

// Time-weighted average of an observable along one long boundary-driven
// trajectory after burn-in, with batch-means standard error.
Estimate stationary_time_average(
    const ProcessSpec& boundary_spec,
    const std::function<double(const OccupationConfig&)>& observable,
    double burn_in, double horizon, std::uint64_t seed, long batches = 20);

}  // namespace dualiscope
