#pragma once

#include <string>
#include <vector>

#include "dualiscope/config.hpp"
#include "dualiscope/exact.hpp"
#include "dualiscope/graph.hpp"
#include "dualiscope/polynomial.hpp"
#include "dualiscope/process.hpp"

namespace dualiscope {

enum class DiffusionFamily { Bmp, Bep };

// Single-site inclusion duality value
//   d(k, l) = l!/(l-k)! * 1/((m/2)(m/2+1)...(m/2+k-1)),
// zero for k > l. The Gamma ratio is always the rising-factorial product;
// the Gamma function itself is never evaluated.
Rat sip_d(long k, long l, const Rat& m);

// Single-site exclusion duality value C(l,k)/C(n,k); zero for k > l.
// Requires k <= n.
Rat sep_d(long k, long l, long n);

// Momentum-diffusion duality monomial z^{2k}/(2k-1)!! in the site variable.
Polynomial bmp_d(int n_vars, int site, long k);

// Energy-diffusion duality monomial y^k / (2^k (m/2)...(m/2+k-1)).
Polynomial bep_d(int n_vars, int site, long k, const Rat& m);

// Product over sites of the single-site values; spec must be Sip or Sep.
Rat duality_product(const DualConfig& xi, const OccupationConfig& eta,
                    const ProcessSpec& spec);

// Duality function of the boundary-driven chain: xi lives on {0..N+1},
// eta on {1..N}; absorbed particles contribute reservoir densities:
//   rho_left^{xi_0} * D(xi|_{1..N}, eta) * rho_right^{xi_{N+1}}.
Rat boundary_duality(const DualConfig& xi, const OccupationConfig& eta,
                     const Rat& m, const Rat& rho_left, const Rat& rho_right);

// | D(sum_i delta_{x_i}, eta) - prod_i D(delta_{x_i}, eta) |;
// exactly zero when all dual particles sit on distinct sites.
Rat factorization_defect(const DualConfig& xi, const OccupationConfig& eta,
                         const ProcessSpec& spec);

// Product duality polynomial for a diffusion family (m ignored for Bmp).
Polynomial dual_polynomial(const DualConfig& xi, DiffusionFamily family,
                           const Rat& m);

// Image of f under the diffusion generator, summed over unordered edges:
//   Bmp:    p(x,y) (eta_x d_y - eta_y d_x)^2
//   Bep(m): p(x,y) [4 eta_x eta_y (d_x - d_y)^2 - 2m (eta_x - eta_y)(d_x - d_y)]
Polynomial apply_diffusion_generator(const Polynomial& f, const SiteGraph& g,
                                     DiffusionFamily family, const Rat& m);

// Pointwise self-duality residual (L D(xi, .))(eta) - (L D(., eta))(xi)
// for the inclusion/exclusion process; exactly zero when duality holds.
Rat self_duality_residual(const ProcessSpec& spec, const SiteGraph& g,
                          const DualConfig& xi, const OccupationConfig& eta);

// Residual of the boundary-driven chain against its absorbing dual.
Rat boundary_duality_residual(const ProcessSpec& boundary_spec,
                              const DualConfig& xi,
                              const OccupationConfig& eta);

// Coefficient-wise residual polynomial
//   L_diff D(xi, .) - sum_moves rate (D(xi', .) - D(xi, .))
// where the dual moves are those of SIP(1) for Bmp and SIP(m) for Bep.
Polynomial diffusion_duality_residual(DiffusionFamily family, const Rat& m,
                                      const SiteGraph& g, const DualConfig& xi);

// Exact residual of the reservoir-rate identity
//   b(n)(d(k,n+1)-d(k,n)) + d_rate(n)(d(k,n-1)-d(k,n))
//     - k (d(k-1,n) rho - d(k,n))
// for k <= n; zero certifies that the chosen birth/death rates make the
// boundary part of the duality relation hold.
Rat boundary_rate_identity_residual(long k, long n, const Rat& m,
                                    const Rat& lambda);

struct DualityScan {
  long cases = 0;
  Rat max_abs_residual = 0;
  std::string worst_case;
};

// Exhaustive residual sweep over all xi with |xi| <= max_dual (per-site cap
// applied for exclusion) and all eta with per-site occupancy <= max_occupancy.
DualityScan scan_self_duality(const ProcessSpec& spec, const SiteGraph& g,
                              int max_dual, int max_occupancy);

DualityScan scan_boundary_duality(const ProcessSpec& boundary_spec,
                                  int max_dual, int max_occupancy);

// Sweeps all xi with |xi| <= max_dual; residuals are polynomial
// coefficients. Also reports the best uniform scaling of the dual side:
// scale_hint = 1 and residual 0 when the duality holds on the nose.
struct DiffusionScan {
  long cases = 0;
  Rat max_abs_residual = 0;
  std::string worst_case;
  Rat scale_hint = 1;
};

DiffusionScan scan_diffusion_duality(DiffusionFamily family, const Rat& m,
                                     const SiteGraph& g, int max_dual);

}  // namespace dualiscope
