#include "dualiscope/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dualiscope/duality.hpp"
#include "dualiscope/errors.hpp"
#include "dualiscope/semigroup.hpp"

namespace dualiscope {

namespace {

std::string tuple_str(const LabeledConfig& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

long int_pow(long base, int e) {
  long out = 1;
  while (e-- > 0) out *= base;
  return out;
}

// Min eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
double jacobi_min_eigenvalue(std::vector<std::vector<double>> a) {
  const int n = static_cast<int>(a.size());
  if (n == 1) return a[0][0];
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  double least = a[0][0];
  for (int i = 1; i < n; ++i) least = std::min(least, a[i][i]);
  return least;
}

Rat exact_det(std::vector<std::vector<Rat>> a) {
  const int n = static_cast<int>(a.size());
  Rat det = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int row = col; row < n; ++row)
      if (a[row][col] != 0) {
        pivot = row;
        break;
      }
    if (pivot < 0) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int row = col + 1; row < n; ++row) {
      if (a[row][col] == 0) continue;
      Rat factor = a[row][col] / a[col][col];
      for (int k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
    }
  }
  return det;
}

// PSD test for an exact symmetric matrix: every principal minor >= 0.
bool exact_psd(const std::vector<std::vector<Rat>>& a) {
  const int n = static_cast<int>(a.size());
  for (long mask = 1; mask < (1L << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1L << i)) idx.push_back(i);
    std::vector<std::vector<Rat>> sub(idx.size(),
                                      std::vector<Rat>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        sub[r][c] = a[idx[r]][idx[c]];
    if (exact_det(std::move(sub)) < 0) return false;
  }
  return true;
}

}  // namespace

long PDFunction::index(const LabeledConfig& x) const {
  if (static_cast<int>(x.size()) != arity)
    throw InvalidConfig("tuple arity mismatch");
  long idx = 0;
  for (int coordinate : x) {
    if (coordinate < 0 || coordinate >= sites)
      throw InvalidConfig("tuple coordinate off the site set");
    idx = idx * sites + coordinate;
  }
  return idx;
}

PDFunction PDFunction::from_exact(int sites, int arity,
                                  std::vector<Rat> values) {
  PDFunction f;
  f.sites = sites;
  f.arity = arity;
  if (static_cast<long>(values.size()) != int_pow(sites, arity))
    throw InvalidConfig("table size does not match sites^arity");
  f.exact = std::move(values);
  f.table.reserve(f.exact.size());
  for (const Rat& v : f.exact) f.table.push_back(to_double(v));
  return f;
}

bool is_symmetric_function(const PDFunction& f) {
  const long size = int_pow(f.sites, f.arity);
  std::vector<int> digits(f.arity);
  for (long idx = 0; idx < size; ++idx) {
    long rem = idx;
    for (int i = f.arity - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rem % f.sites);
      rem /= f.sites;
    }
    for (int i = 0; i < f.arity; ++i)
      for (int j = i + 1; j < f.arity; ++j) {
        std::vector<int> swapped = digits;
        std::swap(swapped[i], swapped[j]);
        long other = 0;
        for (int d : swapped) other = other * f.sites + d;
        if (!f.exact.empty()) {
          if (f.exact[idx] != f.exact[other]) return false;
        } else if (f.table[idx] != f.table[other]) {
          return false;
        }
      }
  }
  return true;
}

PdVerdict is_positive_definite(const PDFunction& f) {
  if (int_pow(f.sites, f.arity) > kStateSpaceGuard)
    throw ResourceError("tuple space exceeds the guard");
  PdVerdict verdict;
  verdict.exact_path = !f.exact.empty() && f.sites <= 6;
  if (f.arity < 2) {  // no coordinate pair to test
    verdict.pass = true;
    verdict.min_eigenvalue = 0;
    return verdict;
  }
  const long others = int_pow(f.sites, f.arity - 2);
  double min_eig = std::numeric_limits<double>::infinity();
  bool exact_ok = true;
  std::vector<int> rest(f.arity - 2);
  for (int i = 0; i < f.arity && (exact_ok || !verdict.exact_path); ++i)
    for (int j = i + 1; j < f.arity; ++j)
      for (long fix = 0; fix < others; ++fix) {
        long rem = fix;
        for (int k = f.arity - 3; k >= 0; --k) {
          rest[k] = static_cast<int>(rem % f.sites);
          rem /= f.sites;
        }
        std::vector<int> tuple(f.arity);
        int used = 0;
        for (int k = 0; k < f.arity; ++k)
          if (k != i && k != j) tuple[k] = rest[used++];
        std::vector<std::vector<double>> pair_d(
            f.sites, std::vector<double>(f.sites));
        std::vector<std::vector<Rat>> pair_x;
        if (verdict.exact_path)
          pair_x.assign(f.sites, std::vector<Rat>(f.sites));
        for (int u = 0; u < f.sites; ++u)
          for (int v = 0; v < f.sites; ++v) {
            tuple[i] = u;
            tuple[j] = v;
            const long idx = f.index(tuple);
            pair_d[u][v] = f.table[idx];
            if (verdict.exact_path) pair_x[u][v] = f.exact[idx];
          }
        min_eig = std::min(min_eig, jacobi_min_eigenvalue(pair_d));
        if (verdict.exact_path && exact_ok) exact_ok = exact_psd(pair_x);
      }
  verdict.min_eigenvalue = min_eig;
  verdict.pass = verdict.exact_path ? exact_ok : min_eig >= -1e-10;
  return verdict;
}

PDFunction random_pd_function(int sites, int arity, Rng& rng) {
  const long size = int_pow(sites, arity);
  std::vector<Rat> values(size, Rat(0));
  auto rat_draw = [&rng]() {
    return frac(static_cast<long>(rng.uniform_below(9)), 4);
  };

  // Nonnegative combination of product terms and a diagonal block.
  const int product_terms = 1 + static_cast<int>(rng.uniform_below(2));
  for (int term = 0; term < product_terms; ++term) {
    Rat alpha = rat_draw();
    std::vector<Rat> gvals(sites);
    for (int u = 0; u < sites; ++u) gvals[u] = rat_draw();
    std::vector<int> digits(arity);
    for (long idx = 0; idx < size; ++idx) {
      long rem = idx;
      Rat prod = alpha;
      for (int i = arity - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(rem % sites);
        rem /= sites;
        prod *= gvals[digits[i]];
      }
      values[idx] += prod;
    }
  }
  if (rng.uniform_below(2) == 0) {
    for (int u = 0; u < sites; ++u) {
      Rat c = rat_draw();
      long idx = 0;
      for (int i = 0; i < arity; ++i) idx = idx * sites + u;
      values[idx] += c;
    }
  }
  return PDFunction::from_exact(sites, arity, std::move(values));
}

CheckReport make_report(std::string name, long cases, double worst_margin,
                        double tolerance, std::string worst_case) {
  CheckReport report;
  report.name = std::move(name);
  report.cases_checked = cases;
  report.worst_margin = worst_margin;
  report.tolerance = tolerance;
  report.pass = worst_margin >= -tolerance;
  report.worst_case = std::move(worst_case);
  return report;
}

CheckReport comparison_check(const SiteGraph& g, int n, const Rat& a,
                             const Rat& b, const PDFunction& f, double t,
                             double eps, int jobs) {
  if (f.sites != g.size() || f.arity != n)
    throw InvalidConfig("test function shape does not match (graph, n)");
  ProcessSpec::generalized_ab(a, b);  // validates admissibility of the pair
  if (!is_symmetric_function(f))
    throw PreconditionError("test function is not symmetric");
  if (!is_positive_definite(f).pass)
    throw PreconditionError("test function is not positive definite");

  GeneratorMatrix interacting = build_labeled_generator(g, n, a, b);
  GeneratorMatrix walkers = build_labeled_generator(g, n, a, Rat(0));
  std::vector<double> f_int(interacting.state_count());
  for (int s = 0; s < interacting.state_count(); ++s)
    f_int[s] = f.table[f.index(interacting.states[s])];
  std::vector<double> f_walk(walkers.state_count());
  for (int s = 0; s < walkers.state_count(); ++s)
    f_walk[s] = f.table[f.index(walkers.states[s])];

  auto evolved_int = semigroup_apply(interacting, f_int, t, eps, jobs);
  auto evolved_walk = semigroup_apply(walkers, f_walk, t, eps, jobs);

  const double sign = b < 0 ? -1.0 : 1.0;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_at;
  for (int s = 0; s < interacting.state_count(); ++s) {
    const int ws = walkers.state_index(interacting.states[s]);
    const double margin =
        sign * (evolved_int.values[s] - evolved_walk.values[ws]);
    if (margin < worst) {
      worst = margin;
      worst_at = tuple_str(interacting.states[s]);
    }
  }
  std::ostringstream name;
  name << "comparison a=" << rat_str(a) << " b=" << rat_str(b) << " n=" << n
       << " t=" << t;
  return make_report(name.str(), interacting.state_count(), worst,
                     2 * eps + 1e-10, worst_at);
}

double DualMomentTable::at(const LabeledConfig& points) const {
  return values[gen.state_index(points)];
}

DualMomentTable dual_moment_table(const SiteGraph& g, const Rat& a,
                                  const Rat& b, const std::vector<Rat>& rho,
                                  int n, double t, double eps, int jobs) {
  if (static_cast<int>(rho.size()) != g.size())
    throw InvalidConfig("density profile length does not match the graph");
  DualMomentTable table{build_labeled_generator(g, n, a, b), {}};
  std::vector<double> f(table.gen.state_count());
  for (int s = 0; s < table.gen.state_count(); ++s) {
    Rat prod = 1;
    for (int x : table.gen.states[s]) prod *= rho[x];
    f[s] = to_double(prod);
  }
  table.values = semigroup_apply(table.gen, f, t, eps, jobs).values;
  return table;
}

namespace {

// Shared body of the correlation checks built on the dual representation.
CheckReport correlation_margin(const SiteGraph& g, const Rat& a, const Rat& b,
                               const std::vector<Rat>& rho,
                               const LabeledConfig& points, double t,
                               double eps, int jobs, bool expect_upper,
                               const std::string& name) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw InvalidParameter("need at least one point");
  auto joint = dual_moment_table(g, a, b, rho, n, t, eps, jobs);
  auto single = dual_moment_table(g, a, b, rho, 1, t, eps, jobs);
  const double lhs = joint.at(points);
  double rhs = 1;
  for (int x : points) rhs *= single.at({x});
  const double raw = lhs - rhs;
  const double margin = expect_upper ? -raw : raw;
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  const double tol = (n + 1) * eps * scale + 1e-10;
  CheckReport report = make_report(name, 1, margin, tol, tuple_str(points));
  std::ostringstream note;
  note << "joint=" << lhs << " product=" << rhs;
  report.notes.push_back(note.str());
  return report;
}

}  // namespace

CheckReport sip_correlation_check(const SiteGraph& g, const Rat& m,
                                  const std::vector<Rat>& lambda_profile,
                                  const LabeledConfig& points, double t,
                                  double eps, int jobs) {
  if (m <= 0) throw InvalidSpec("inclusion parameter m must be positive");
  std::vector<Rat> rho(lambda_profile.size());
  for (std::size_t x = 0; x < lambda_profile.size(); ++x) {
    if (lambda_profile[x] < 0 || lambda_profile[x] >= 1)
      throw InvalidParameter("lambda profile must lie in [0, 1)");
    rho[x] = lambda_profile[x] / (1 - lambda_profile[x]);
  }
  std::ostringstream name;
  name << "sip-correlation m=" << rat_str(m) << " points="
       << tuple_str(points) << " t=" << t;
  CheckReport report = correlation_margin(g, 2 * m, Rat(4), rho, points, t,
                                          eps, jobs, false, name.str());
  if (points.size() == 2) {
    auto cov = occupation_covariance(g, m, lambda_profile, points[0],
                                     points[1], t, eps, jobs);
    std::ostringstream note;
    note << "occupation covariance(" << points[0] << "," << points[1]
         << ") = " << cov.covariance;
    report.notes.push_back(note.str());
  }
  return report;
}

CheckReport sep_correlation_check(const SiteGraph& g, long n_cap,
                                  const std::vector<Rat>& rho_profile,
                                  const LabeledConfig& points, double t,
                                  double eps, int jobs) {
  if (n_cap < 1) throw InvalidSpec("exclusion cap must be >= 1");
  for (const Rat& r : rho_profile)
    if (r < 0 || r > 1)
      throw InvalidParameter("rho profile must lie in [0, 1]");
  std::vector<int> multiplicity(g.size(), 0);
  for (int x : points)
    if (++multiplicity[x] > n_cap)
      throw InvalidConfig("points exceed the exclusion cap at a site");
  std::ostringstream name;
  name << "sep-correlation n=" << n_cap << " points=" << tuple_str(points)
       << " t=" << t;
  return correlation_margin(g, Rat(n_cap), Rat(-1), rho_profile, points, t,
                            eps, jobs, true, name.str());
}

CheckReport diffusion_correlation_check(DiffusionCorrelationFamily family,
                                        const Rat& m, const SiteGraph& g,
                                        const std::vector<Rat>& profile,
                                        const LabeledConfig& points, double t,
                                        double eps, int jobs) {
  const bool momentum = family == DiffusionCorrelationFamily::Bmp;
  if (!momentum && m <= 0) throw InvalidSpec("energy diffusion needs m > 0");
  std::vector<Rat> rho(profile.size());
  for (std::size_t x = 0; x < profile.size(); ++x) {
    if (momentum) {
      if (profile[x] < 0)
        throw InvalidParameter("variance profile must be nonnegative");
      rho[x] = profile[x];
    } else {
      if (profile[x] <= 0)
        throw InvalidParameter("scale profile must be positive");
      rho[x] = profile[x] / 2;
    }
  }
  const Rat dual_m = momentum ? Rat(1) : m;
  std::ostringstream name;
  name << (momentum ? "bmp" : "bep") << "-correlation m=" << rat_str(dual_m)
       << " points=" << tuple_str(points) << " t=" << t;
  return correlation_margin(g, 2 * dual_m, Rat(4), rho, points, t, eps, jobs,
                            false, name.str());
}

namespace {

// Steady-state moment of the driven chain for a dual start xi: reservoir
// densities weighted by the exact absorption split of the dual particles.
Rat steady_state_moment(const GeneratorMatrix& dual_gen,
                        const AbsorptionTable& table, const DualConfig& xi,
                        const Rat& rho_l, const Rat& rho_r) {
  const int start = dual_gen.state_index(xi);
  Rat out = 0;
  for (std::size_t a = 0; a < table.absorbing.size(); ++a) {
    const auto& absorbed = dual_gen.states[table.absorbing[a]];
    out += table.probabilities[start][a] * rat_pow(rho_l, absorbed.front()) *
           rat_pow(rho_r, absorbed.back());
  }
  return out;
}

}  // namespace

Rat boundary_steady_moment(const GeneratorMatrix& dual_gen,
                           const AbsorptionTable& table,
                           const LabeledConfig& points, int chain_length,
                           const Rat& rho_left, const Rat& rho_right) {
  DualConfig xi(chain_length + 2, 0);
  for (int p : points) {
    if (p < 1 || p > chain_length)
      throw InvalidConfig("points must lie in {1..N}");
    ++xi[p];
  }
  return steady_state_moment(dual_gen, table, xi, rho_left, rho_right);
}

CheckReport boundary_correlation_check(int chain_length, const Rat& m,
                                       const Rat& lambda_left,
                                       const Rat& lambda_right,
                                       const LabeledConfig& points) {
  const int n = static_cast<int>(points.size());
  if (n < 1) throw InvalidParameter("need at least one point");
  if (n > 3) throw ResourceError("boundary checks support up to 3 dual particles");
  for (int p : points)
    if (p < 1 || p > chain_length)
      throw InvalidConfig("points must lie in {1..N}");
  const ProcessSpec spec = ProcessSpec::boundary_driven_sip(
      m, lambda_left, lambda_right, chain_length);
  const Rat rho_l = lambda_left / (1 - lambda_left);
  const Rat rho_r = lambda_right / (1 - lambda_right);

  GeneratorMatrix joint_gen =
      build_absorbing_dual_generator(chain_length, m, n);
  AbsorptionTable joint_table = absorption_table(joint_gen);
  DualConfig xi(chain_length + 2, 0);
  for (int p : points) ++xi[p];
  const Rat lhs = steady_state_moment(joint_gen, joint_table, xi, rho_l, rho_r);

  GeneratorMatrix one_gen = build_absorbing_dual_generator(chain_length, m, 1);
  AbsorptionTable one_table = absorption_table(one_gen);
  Rat rhs = 1;
  for (int p : points) {
    DualConfig single(chain_length + 2, 0);
    single[p] = 1;
    rhs *= steady_state_moment(one_gen, one_table, single, rho_l, rho_r);
  }

  const Rat margin = lhs - rhs;
  std::ostringstream name;
  name << "boundary-correlation N=" << chain_length << " m=" << rat_str(m)
       << " points=" << tuple_str(points);
  CheckReport report = make_report(name.str(), 1, to_double(margin), 1e-12,
                                   tuple_str(points));
  report.pass = margin >= 0;  // exact arithmetic decides
  report.notes.push_back("margin_exact=" + rat_str(margin));
  report.notes.push_back("moment_exact=" + rat_str(lhs));
  if (lambda_left == lambda_right && margin != 0) report.pass = false;
  if (lambda_left != lambda_right && margin == 0 && n > 1)
    report.notes.push_back("equality off equilibrium");
  (void)spec;
  return report;
}

DensityProfileReport density_profile(int chain_length, const Rat& m,
                                     const Rat& lambda_left,
                                     const Rat& lambda_right) {
  ProcessSpec::boundary_driven_sip(m, lambda_left, lambda_right, chain_length);
  const Rat rho_l = lambda_left / (1 - lambda_left);
  const Rat rho_r = lambda_right / (1 - lambda_right);
  GeneratorMatrix gen = build_absorbing_dual_generator(chain_length, m, 1);
  AbsorptionTable table = absorption_table(gen);
  DensityProfileReport report;
  for (int i = 1; i <= chain_length; ++i) {
    DualConfig xi(chain_length + 2, 0);
    xi[i] = 1;
    report.moments.push_back(
        steady_state_moment(gen, table, xi, rho_l, rho_r));
    report.interpolation.push_back(rho_l * Rat(chain_length + 1 - i) /
                                       Rat(chain_length + 1) +
                                   rho_r * Rat(i) / Rat(chain_length + 1));
  }
  report.max_abs_second_difference = 0;
  for (int i = 1; i + 1 < chain_length; ++i) {
    Rat second = report.moments[i + 1] - 2 * report.moments[i] +
                 report.moments[i - 1];
    if (rat_abs(second) > report.max_abs_second_difference)
      report.max_abs_second_difference = rat_abs(second);
  }
  report.max_interpolation_deviation = 0;
  for (int i = 0; i < chain_length; ++i) {
    Rat dev = rat_abs(report.moments[i] - report.interpolation[i]);
    if (dev > report.max_interpolation_deviation)
      report.max_interpolation_deviation = dev;
  }
  return report;
}

std::vector<MeetingRow> meeting_probability_report(
    const SiteGraph& g, const Rat& m, const LabeledConfig& start,
    const std::vector<double>& t_grid, double eps, int jobs) {
  const int n = static_cast<int>(start.size());
  if (n < 2) throw InvalidParameter("need at least two particles");
  if (m <= 0) throw InvalidSpec("inclusion parameter m must be positive");
  const int sites = g.size();
  const OccupationConfig eta0 = occupation_of(start, sites);
  const Rat c_m = (m / 2) * (m / 2 + 1);       // l^2 - l = c_m d(2, l)
  const Rat occ_factor = 1 + Rat(2) / m;       // c_m d(1,.)^2 coefficient

  GeneratorMatrix full_gen = build_labeled_generator(g, n, 2 * m, Rat(4));
  const UniformizedOperator full_op = uniformize(full_gen);
  std::vector<double> meet_fn(full_gen.state_count());
  std::vector<double> pair_fn(full_gen.state_count());
  for (int s = 0; s < full_gen.state_count(); ++s) {
    const auto& tuple = full_gen.states[s];
    bool meets = false;
    for (int i = 0; i < n && !meets; ++i)
      for (int j = i + 1; j < n; ++j)
        if (tuple[i] == tuple[j]) {
          meets = true;
          break;
        }
    meet_fn[s] = meets ? 1.0 : 0.0;
    OccupationConfig occ = occupation_of(tuple, sites);
    double acc = 0;
    for (int z = 0; z < sites; ++z)
      acc += static_cast<double>(occ[z]) * occ[z] - occ[z];
    pair_fn[s] = acc;
  }

  GeneratorMatrix pair_gen = build_labeled_generator(g, 2, 2 * m, Rat(4));
  const UniformizedOperator pair_op = uniformize(pair_gen);
  std::vector<double> dual_fn(pair_gen.state_count());
  std::vector<double> occ_fn(pair_gen.state_count());
  std::vector<double> diag_fn(pair_gen.state_count());
  for (int s = 0; s < pair_gen.state_count(); ++s) {
    const auto& uv = pair_gen.states[s];
    DualConfig xi(sites, 0);
    ++xi[uv[0]];
    ++xi[uv[1]];
    dual_fn[s] = to_double(
        c_m * duality_product(xi, eta0, ProcessSpec::sip(m)));
    occ_fn[s] =
        to_double(occ_factor) * eta0[uv[0]] * eta0[uv[1]];
    diag_fn[s] = uv[0] == uv[1] ? 1.0 : 0.0;
  }

  const int start_idx = full_gen.state_index(start);
  std::vector<MeetingRow> rows;
  for (double t : t_grid) {
    MeetingRow row;
    row.t = t;
    row.meet_probability =
        semigroup_apply(full_op, meet_fn, t, eps, jobs).values[start_idx];
    row.pair_moment_sum =
        semigroup_apply(full_op, pair_fn, t, eps, jobs).values[start_idx];
    auto dual_vals = semigroup_apply(pair_op, dual_fn, t, eps, jobs).values;
    auto occ_vals = semigroup_apply(pair_op, occ_fn, t, eps, jobs).values;
    auto diag_vals = semigroup_apply(pair_op, diag_fn, t, eps, jobs).values;
    double dual_sum = 0, occ_sum = 0, diag_max = 0;
    for (int z = 0; z < sites; ++z) {
      const int zz = pair_gen.state_index({z, z});
      dual_sum += dual_vals[zz];
      occ_sum += occ_vals[zz];
    }
    for (double v : diag_vals) diag_max = std::max(diag_max, v);
    row.dual_moment_sum = dual_sum;
    row.occupancy_bound = occ_sum;
    row.walker_bound = to_double(occ_factor) * n * n * diag_max;
    const double slack = 1e-8 + 1000 * eps;
    row.ordered = row.meet_probability <= row.pair_moment_sum + slack &&
                  std::abs(row.pair_moment_sum - row.dual_moment_sum) <=
                      slack * std::max(1.0, std::abs(row.pair_moment_sum)) &&
                  row.dual_moment_sum <= row.occupancy_bound + slack &&
                  row.occupancy_bound <= row.walker_bound + slack;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Rat> monomial_in_duality_basis(int power, const ProcessSpec& spec) {
  if (power < 0) throw InvalidParameter("negative power");
  auto d = [&spec](long k, long l) {
    return spec.kind == ProcessSpec::Kind::Sip ? sip_d(k, l, spec.m)
                                               : sep_d(k, l, spec.cap);
  };
  if (spec.kind != ProcessSpec::Kind::Sip &&
      spec.kind != ProcessSpec::Kind::Sep)
    throw InvalidPairing("duality basis needs SIP or SEP");
  if (spec.kind == ProcessSpec::Kind::Sep && power > spec.cap)
    throw InvalidParameter("power above the exclusion cap");
  std::vector<Rat> coeff(power + 1, Rat(0));
  for (long l = 0; l <= power; ++l) {
    Rat rhs = rat_pow(Rat(l), power);
    for (long k = 0; k < l; ++k) rhs -= coeff[k] * d(k, l);
    coeff[l] = rhs / d(l, l);
  }
  return coeff;
}

CovarianceReport occupation_covariance(const SiteGraph& g, const Rat& m,
                                       const std::vector<Rat>& lambda_profile,
                                       int x, int y, double t, double eps,
                                       int jobs) {
  std::vector<Rat> rho(lambda_profile.size());
  for (std::size_t s = 0; s < lambda_profile.size(); ++s)
    rho[s] = lambda_profile[s] / (1 - lambda_profile[s]);
  const ProcessSpec spec = ProcessSpec::sip(m);
  auto joint = dual_moment_table(g, 2 * m, Rat(4), rho, 2, t, eps, jobs);
  auto single = dual_moment_table(g, 2 * m, Rat(4), rho, 1, t, eps, jobs);
  const auto c1 = monomial_in_duality_basis(1, spec);
  auto k_value = [&](int k1, int k2) -> double {
    if (k1 == 0 && k2 == 0) return 1.0;
    if (k1 == 0) return single.at({y});
    if (k2 == 0) return single.at({x});
    return joint.at({x, y});
  };
  CovarianceReport report;
  report.mean_x = to_double(c1[0]) + to_double(c1[1]) * single.at({x});
  report.mean_y = to_double(c1[0]) + to_double(c1[1]) * single.at({y});
  if (x != y) {
    double exy = 0;
    for (int k1 = 0; k1 <= 1; ++k1)
      for (int k2 = 0; k2 <= 1; ++k2)
        exy += to_double(c1[k1]) * to_double(c1[k2]) * k_value(k1, k2);
    report.covariance = exy - report.mean_x * report.mean_y;
  } else {
    const auto c2 = monomial_in_duality_basis(2, spec);
    double exx = to_double(c2[0]) + to_double(c2[1]) * single.at({x}) +
                 to_double(c2[2]) * joint.at({x, x});
    report.covariance = exx - report.mean_x * report.mean_x;
  }
  return report;
}

}  // namespace dualiscope
