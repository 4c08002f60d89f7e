#pragma once

#include <string>
#include <vector>

#include "dualiscope/absorption.hpp"
#include "dualiscope/config.hpp"
#include "dualiscope/exact.hpp"
#include "dualiscope/generator.hpp"
#include "dualiscope/graph.hpp"
#include "dualiscope/process.hpp"
#include "dualiscope/rng.hpp"

namespace dualiscope {

// Table of a function S^n -> R, row-major in the particle coordinates.
// When the values are rational an exact copy rides along and positive
// semidefiniteness is decided exactly (principal minors); the double table
// feeds the semigroup engine either way.
struct PDFunction {
  int sites = 0;
  int arity = 0;
  std::vector<double> table;
  std::vector<Rat> exact;  // optional, same layout

  long index(const LabeledConfig& x) const;
  double value(const LabeledConfig& x) const { return table[index(x)]; }
  static PDFunction from_exact(int sites, int arity, std::vector<Rat> values);
};

// Invariance under coordinate transpositions.
bool is_symmetric_function(const PDFunction& f);

struct PdVerdict {
  bool pass = false;
  double min_eigenvalue = 0;
  bool exact_path = false;
};

// Positive definiteness in every pair of coordinates with the remaining
// coordinates fixed: each |S| x |S| pair matrix must be symmetric positive
// semidefinite (eigenvalue tolerance -1e-10 on the floating path; exact
// principal-minor test when rational values are available).
PdVerdict is_positive_definite(const PDFunction& f);

// Random element of the positive-definite symmetric test family:
// nonnegative combinations of product functions prod_i g(x_i) and diagonal
// blocks sum_u c_u prod_i I(x_i = u) with rational coefficients.
PDFunction random_pd_function(int sites, int arity, Rng& rng);

struct CheckReport {
  std::string name;
  long cases_checked = 0;
  double worst_margin = 0;
  double tolerance = 0;
  bool pass = false;
  std::string worst_case;
  std::vector<std::string> notes;
};

CheckReport make_report(std::string name, long cases, double worst_margin,
                        double tolerance, std::string worst_case = "");

// Interacting vs independent-walker semigroup on a positive definite
// symmetric f: reports min over tuples of sign(b) (T^{a,b}_t f - U^a_t f).
// Hypothesis failures (asymmetric or non-PD f) throw PreconditionError.
CheckReport comparison_check(const SiteGraph& g, int n, const Rat& a,
                             const Rat& b, const PDFunction& f, double t,
                             double eps, int jobs = 0);

// Table over S^n of E^{(a,b)}_x [prod_i rho(X_i(t))], the dual
// representation of the time-evolved duality moments.
struct DualMomentTable {
  GeneratorMatrix gen;
  std::vector<double> values;
  double at(const LabeledConfig& points) const;
};
DualMomentTable dual_moment_table(const SiteGraph& g, const Rat& a,
                                  const Rat& b, const std::vector<Rat>& rho,
                                  int n, double t, double eps, int jobs = 0);

// Inclusion process started from the local-stationary product measure with
// profile lambda: the n-point duality moment dominates the product of
// one-point moments. margin = K(x_1..x_n) - prod K(x_i) >= 0.
CheckReport sip_correlation_check(const SiteGraph& g, const Rat& m,
                                  const std::vector<Rat>& lambda_profile,
                                  const LabeledConfig& points, double t,
                                  double eps, int jobs = 0);

// Exclusion counterpart; the inequality flips, so margin is reported as
// prod K(x_i) - K(x_1..x_n) >= 0.
CheckReport sep_correlation_check(const SiteGraph& g, long n_cap,
                                  const std::vector<Rat>& rho_profile,
                                  const LabeledConfig& points, double t,
                                  double eps, int jobs = 0);

enum class DiffusionCorrelationFamily { Bmp, Bep };

// Momentum/energy diffusion moments computed exactly through the dual
// inclusion process (no diffusion simulation involved); margin >= 0.
CheckReport diffusion_correlation_check(DiffusionCorrelationFamily family,
                                        const Rat& m, const SiteGraph& g,
                                        const std::vector<Rat>& profile,
                                        const LabeledConfig& points, double t,
                                        double eps, int jobs = 0);

// Steady state of the boundary-driven chain via exact absorption
// probabilities of the dual: n-point moment >= product of one-point
// moments, exactly; equality holds iff the reservoirs match.
CheckReport boundary_correlation_check(int chain_length, const Rat& m,
                                       const Rat& lambda_left,
                                       const Rat& lambda_right,
                                       const LabeledConfig& points);

// Exact steady-state duality moment for dual particles started at `points`
// (sites in {1..N}), given the dual generator and its absorption table, so
// sweeps over many point sets reuse one solve.
Rat boundary_steady_moment(const GeneratorMatrix& dual_gen,
                           const AbsorptionTable& table,
                           const LabeledConfig& points, int chain_length,
                           const Rat& rho_left, const Rat& rho_right);

// Exact steady-state one-point moments: affine in the site index (second
// differences exactly zero), compared against the straight-line
// interpolation of the reservoir densities (which matches only at a
// specific bulk/absorption rate ratio; the deviation is reported, never
// rescaled away).
struct DensityProfileReport {
  std::vector<Rat> moments;  // sites 1..N
  Rat max_abs_second_difference;
  std::vector<Rat> interpolation;
  Rat max_interpolation_deviation;
};
DensityProfileReport density_profile(int chain_length, const Rat& m,
                                     const Rat& lambda_left,
                                     const Rat& lambda_right);

// Finite-time diagnostics for the walkers-drift-apart argument: each row
// evaluates the chain of quantities bounding the probability that two of
// the particles share a site, and checks their ordering.
struct MeetingRow {
  double t = 0;
  double meet_probability = 0;   // P(exists i != j with X_i = X_j)
  double pair_moment_sum = 0;    // sum_z E[eta_t(z)^2 - eta_t(z)]
  double dual_moment_sum = 0;    // same, evaluated through the dual pair
  double occupancy_bound = 0;    // (1 + 2/m) sum_z E_{(z,z)} eta0(X) eta0(Y)
  double walker_bound = 0;       // (1 + 2/m) n^2 sup_{x,y} P(X_t = Y_t)
  bool ordered = false;
};
std::vector<MeetingRow> meeting_probability_report(
    const SiteGraph& g, const Rat& m, const LabeledConfig& start,
    const std::vector<double>& t_grid, double eps, int jobs = 0);

// Exact coefficients c_k with l^power = sum_k c_k d(k, l) for all l >= 0
// (solved against the duality polynomials, not hardcoded).
std::vector<Rat> monomial_in_duality_basis(int power, const ProcessSpec& spec);

// Occupation covariance Cov(eta_t(x), eta_t(y)) for the inclusion process
// started from the local-stationary measure, recovered from the duality
// moments via monomial_in_duality_basis.
struct CovarianceReport {
  double mean_x = 0;
  double mean_y = 0;
  double covariance = 0;
};
CovarianceReport occupation_covariance(const SiteGraph& g, const Rat& m,
                                       const std::vector<Rat>& lambda_profile,
                                       int x, int y, double t, double eps,
                                       int jobs = 0);

}  // namespace dualiscope
