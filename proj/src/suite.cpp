#include "dualiscope/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "dualiscope/absorption.hpp"
#include "dualiscope/duality.hpp"
#include "dualiscope/errors.hpp"
#include "dualiscope/inequalities.hpp"
#include "dualiscope/measures.hpp"
#include "dualiscope/montecarlo.hpp"
#include "dualiscope/parallel.hpp"
#include "dualiscope/semigroup.hpp"

namespace dualiscope {

namespace {

constexpr double kEps = 1e-12;

std::vector<SiteGraph> small_graphs() {
  std::vector<SiteGraph> graphs;
  graphs.push_back(SiteGraph::chain(2));
  graphs.push_back(SiteGraph::chain(3));
  graphs.push_back(SiteGraph::chain(4));
  graphs.push_back(SiteGraph::cycle(3));
  return graphs;
}

std::string graph_label(const SiteGraph& g) {
  return (g.edges().size() + 1 == static_cast<std::size_t>(g.size()) ? "chain"
                                                                     : "cycle") +
         std::string("-") + std::to_string(g.size());
}

std::vector<Rat> inclusion_params() {
  return {Rat(1, 2), Rat(1), Rat(2), Rat(7, 3)};
}

struct Tally {
  bool ok = true;
  long cases = 0;
  std::ostringstream notes;
  void fail(const std::string& why) {
    ok = false;
    if (notes.tellp() == 0) notes << why;
  }
};

// ---------------------------------------------------------------- exact units

SuiteUnit unit_sip_self_duality(int /*jobs*/) {
  SuiteUnit unit{"sip-self-duality", false, "", 0};
  Tally tally;
  Rat worst = 0;
  for (const Rat& m : inclusion_params())
    for (const auto& g : small_graphs()) {
      auto scan = scan_self_duality(ProcessSpec::sip(m), g, 3, 4);
      tally.cases += scan.cases;
      if (scan.max_abs_residual > worst) worst = scan.max_abs_residual;
      if (scan.max_abs_residual != 0)
        tally.fail("m=" + rat_str(m) + " " + graph_label(g) + " residual " +
                   rat_str(scan.max_abs_residual) + " at " + scan.worst_case);
    }
  unit.pass = tally.ok;
  std::ostringstream d;
  d << "m in {1/2,1,2,7/3}, |xi|<=3, eta<=4/site on " << 4
    << " graphs: " << tally.cases << " residuals, max |residual| = "
    << rat_str(worst) << " (exact)";
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_sep_self_duality(int /*jobs*/) {
  SuiteUnit unit{"sep-self-duality", false, "", 0};
  Tally tally;
  Rat worst = 0;
  for (long n = 1; n <= 3; ++n)
    for (const auto& g : small_graphs()) {
      auto scan = scan_self_duality(ProcessSpec::sep(n), g, 3, 4);
      tally.cases += scan.cases;
      if (scan.max_abs_residual > worst) worst = scan.max_abs_residual;
      if (scan.max_abs_residual != 0)
        tally.fail("n=" + std::to_string(n) + " " + graph_label(g) +
                   " residual " + rat_str(scan.max_abs_residual));
    }
  unit.pass = tally.ok;
  std::ostringstream d;
  d << "n in {1,2,3}: " << tally.cases << " residuals, max |residual| = "
    << rat_str(worst) << " (exact)";
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_diffusion_duality(int /*jobs*/) {
  SuiteUnit unit{"diffusion-duality", false, "", 0};
  Tally tally;
  Rat worst = 0;
  std::string scale_notes;
  for (const auto& g : small_graphs()) {
    auto bmp = scan_diffusion_duality(DiffusionFamily::Bmp, Rat(1), g, 3);
    tally.cases += bmp.cases;
    if (bmp.max_abs_residual > worst) worst = bmp.max_abs_residual;
    if (bmp.max_abs_residual != 0) {
      tally.fail("momentum " + graph_label(g) + " residual " +
                 rat_str(bmp.max_abs_residual));
      if (bmp.scale_hint != 1)
        scale_notes += " momentum scale hint " + rat_str(bmp.scale_hint);
    }
    for (const Rat& m : inclusion_params()) {
      auto bep = scan_diffusion_duality(DiffusionFamily::Bep, m, g, 3);
      tally.cases += bep.cases;
      if (bep.max_abs_residual > worst) worst = bep.max_abs_residual;
      if (bep.max_abs_residual != 0) {
        tally.fail("energy m=" + rat_str(m) + " " + graph_label(g) +
                   " residual " + rat_str(bep.max_abs_residual));
        if (bep.scale_hint != 1)
          scale_notes += " energy scale hint " + rat_str(bep.scale_hint);
      }
    }
  }
  unit.pass = tally.ok;
  std::ostringstream d;
  d << "momentum<->SIP(1), energy(m)<->SIP(m), |xi|<=3: " << tally.cases
    << " polynomial residuals, max |coefficient| = " << rat_str(worst)
    << " (exact)" << scale_notes;
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_boundary_duality(int /*jobs*/) {
  SuiteUnit unit{"boundary-duality", false, "", 0};
  Tally tally;
  Rat worst = 0;
  const std::vector<std::pair<Rat, Rat>> reservoirs = {
      {Rat(1, 3), Rat(2, 3)}, {Rat(1, 2), Rat(1, 2)}};
  for (int N = 2; N <= 4; ++N)
    for (const Rat& m : {Rat(1, 2), Rat(1), Rat(2)})
      for (const auto& [lam_l, lam_r] : reservoirs) {
        auto spec = ProcessSpec::boundary_driven_sip(m, lam_l, lam_r, N);
        auto scan = scan_boundary_duality(spec, 3, 3);
        tally.cases += scan.cases;
        if (scan.max_abs_residual > worst) worst = scan.max_abs_residual;
        if (scan.max_abs_residual != 0)
          tally.fail(spec.name() + " residual " +
                     rat_str(scan.max_abs_residual) + " at " + scan.worst_case);
      }
  long identity_cases = 0;
  Rat identity_worst = 0;
  for (const Rat& m : {Rat(1, 2), Rat(1), Rat(2)})
    for (const Rat& lambda : {Rat(1, 3), Rat(1, 2), Rat(2, 3)})
      for (long n = 0; n <= 10; ++n)
        for (long k = 0; k <= n; ++k) {
          Rat res = rat_abs(boundary_rate_identity_residual(k, n, m, lambda));
          ++identity_cases;
          if (res > identity_worst) identity_worst = res;
          if (res != 0)
            tally.fail("rate identity k=" + std::to_string(k) +
                       " n=" + std::to_string(n) + " m=" + rat_str(m));
        }
  unit.pass = tally.ok;
  std::ostringstream d;
  d << "N in {2,3,4}, m in {1/2,1,2}: " << tally.cases
    << " residuals (max " << rat_str(worst) << "), reservoir-rate identity "
    << identity_cases << " cases (max " << rat_str(identity_worst)
    << "), all exact";
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_comparison(int jobs, std::uint64_t seed) {
  SuiteUnit unit{"comparison", false, "", 0};
  Tally tally;
  const std::vector<double> times = {0.1, 0.5, 1.0, 5.0};
  // (a, b) pairs: inclusion at m = 1/2 and 1, exclusion caps 1 and 2.
  const std::vector<std::pair<Rat, Rat>> pairs = {
      {Rat(1), Rat(4)}, {Rat(2), Rat(4)}, {Rat(1), Rat(-1)}, {Rat(2), Rat(-1)}};
  const double tol = 2 * kEps + 1e-10;
  double worst_margin = std::numeric_limits<double>::infinity();

  std::vector<SiteGraph> graphs;
  graphs.push_back(SiteGraph::chain(3));
  graphs.push_back(SiteGraph::cycle(3));
  graphs.push_back(SiteGraph::chain(4));
  long function_id = 0;
  for (const auto& g : graphs)
    for (int n = 2; n <= 3; ++n) {
      // 100 positive definite symmetric test functions per (graph, n).
      std::vector<PDFunction> functions;
      for (int i = 0; i < 100; ++i) {
        Rng rng(seed_stream(seed, 5000 + function_id++));
        functions.push_back(random_pd_function(g.size(), n, rng));
        if (!is_positive_definite(functions.back()).pass)
          tally.fail("generated test function not positive definite");
      }
      for (const auto& [a, b] : pairs) {
        GeneratorMatrix interacting = build_labeled_generator(g, n, a, b);
        GeneratorMatrix walkers = build_labeled_generator(g, n, a, Rat(0));
        const UniformizedOperator op_int = uniformize(interacting);
        const UniformizedOperator op_walk = uniformize(walkers);
        std::vector<int> walk_of(interacting.state_count());
        for (int s = 0; s < interacting.state_count(); ++s)
          walk_of[s] = walkers.state_index(interacting.states[s]);
        const double sign = b < 0 ? -1.0 : 1.0;

        const long combos =
            static_cast<long>(functions.size()) * times.size();
        std::vector<double> margins(combos);
        std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
#endif
        for (long c = 0; c < combos; ++c) {
          try {
            const PDFunction& f = functions[c / times.size()];
            const double t = times[c % times.size()];
            std::vector<double> f_int(interacting.state_count());
            for (int s = 0; s < interacting.state_count(); ++s)
              f_int[s] = f.table[f.index(interacting.states[s])];
            std::vector<double> f_walk(walkers.state_count());
            for (int s = 0; s < walkers.state_count(); ++s)
              f_walk[s] = f.table[f.index(walkers.states[s])];
            auto ev_int = semigroup_apply(op_int, f_int, t, kEps, 1);
            auto ev_walk = semigroup_apply(op_walk, f_walk, t, kEps, 1);
            double m_worst = std::numeric_limits<double>::infinity();
            for (int s = 0; s < interacting.state_count(); ++s)
              m_worst = std::min(m_worst, sign * (ev_int.values[s] -
                                                  ev_walk.values[walk_of[s]]));
            margins[c] = m_worst;
          } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) failure = std::current_exception();
            margins[c] = 0;
          }
        }
        if (failure) std::rethrow_exception(failure);
        for (long c = 0; c < combos; ++c) {
          ++tally.cases;
          worst_margin = std::min(worst_margin, margins[c]);
          if (margins[c] < -tol)
            tally.fail("a=" + rat_str(a) + " b=" + rat_str(b) +
                       " margin " + std::to_string(margins[c]));
        }
      }
    }
  unit.pass = tally.ok;
  std::ostringstream d;
  d << "100 PD functions x {chain-3,cycle-3,chain-4} x n in {2,3} x 4 (a,b) "
       "x 4 times: "
    << tally.cases << " margins, worst " << worst_margin << " vs -" << tol;
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_detailed_balance(int /*jobs*/) {
  SuiteUnit unit{"detailed-balance", false, "", 0};
  Tally tally;
  Rat worst = 0;
  long biggest = 0;
  auto check_sip = [&](const SiteGraph& g, long total, const Rat& m,
                       const Rat& lambda) {
    GeneratorMatrix G = build_sector_generator(ProcessSpec::sip(m), g, total);
    biggest = std::max<long>(biggest, G.state_count());
    std::vector<Rat> weights;
    weights.reserve(G.state_count());
    for (const auto& eta : G.states) {
      Rat w = 1;
      for (int k : eta) w *= nu_weight(k, m, lambda);
      weights.push_back(w);
    }
    Rat v = detailed_balance_violation(G, weights);
    ++tally.cases;
    if (v > worst) worst = v;
    if (v != 0)
      tally.fail("inclusion sector m=" + rat_str(m) + " K=" +
                 std::to_string(total) + " violation " + rat_str(v));
  };
  auto check_sep = [&](const SiteGraph& g, long total, long cap,
                       const Rat& rho) {
    GeneratorMatrix G = build_sector_generator(ProcessSpec::sep(cap), g, total);
    biggest = std::max<long>(biggest, G.state_count());
    std::vector<Rat> weights;
    weights.reserve(G.state_count());
    for (const auto& eta : G.states) {
      Rat w = 1;
      for (int k : eta) w *= binomial_pmf(k, cap, rho);
      weights.push_back(w);
    }
    Rat v = detailed_balance_violation(G, weights);
    ++tally.cases;
    if (v > worst) worst = v;
    if (v != 0)
      tally.fail("exclusion sector cap=" + std::to_string(cap) + " violation " +
                 rat_str(v));
  };

  for (const Rat& m : inclusion_params()) {
    check_sip(SiteGraph::chain(3), 6, m, Rat(1, 2));
    check_sip(SiteGraph::chain(4), 8, m, Rat(1, 3));
  }
  check_sip(SiteGraph::cycle(3), 7, Rat(7, 3), Rat(2, 5));
  check_sep(SiteGraph::chain(4), 4, 2, Rat(2, 5));
  check_sep(SiteGraph::chain(3), 5, 3, Rat(1, 3));
  check_sep(SiteGraph::cycle(4), 6, 2, Rat(3, 4));

  unit.pass = tally.ok;
  std::ostringstream d;
  d << tally.cases << " sector measures (largest " << biggest
    << " states), max detailed-balance violation = " << rat_str(worst)
    << " (exact)";
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_correlation_margins(int jobs, std::uint64_t seed) {
  SuiteUnit unit{"correlation-margins", false, "", 0};
  Tally tally;
  double worst = std::numeric_limits<double>::infinity();
  auto pick_graph = [](Rng& rng) {
    switch (rng.uniform_below(3)) {
      case 0:
        return SiteGraph::chain(3);
      case 1:
        return SiteGraph::chain(4);
      default:
        return SiteGraph::cycle(3);
    }
  };
  for (int i = 0; i < 100; ++i) {
    Rng rng(seed_stream(seed, 7000 + i));
    SiteGraph g = pick_graph(rng);
    const Rat m = inclusion_params()[rng.uniform_below(4)];
    std::vector<Rat> lambda(g.size());
    for (auto& l : lambda)
      l = frac(1 + static_cast<long>(rng.uniform_below(20)), 25);
    const int n = 2 + static_cast<int>(rng.uniform_below(2));
    LabeledConfig points(n);
    for (int& p : points) p = static_cast<int>(rng.uniform_below(g.size()));
    const double t = rng.uniform_below(2) == 0 ? 0.3 : 1.0;
    auto report = sip_correlation_check(g, m, lambda, points, t, kEps, jobs);
    ++tally.cases;
    worst = std::min(worst, report.worst_margin);
    if (!report.pass) tally.fail("inclusion case " + std::to_string(i));
  }
  for (int i = 0; i < 100; ++i) {
    Rng rng(seed_stream(seed, 7500 + i));
    SiteGraph g = pick_graph(rng);
    const long cap = 1 + rng.uniform_below(3);
    std::vector<Rat> rho(g.size());
    for (auto& r : rho)
      r = frac(static_cast<long>(rng.uniform_below(26)), 25);
    const int n = 2 + static_cast<int>(rng.uniform_below(2));
    LabeledConfig points;
    std::vector<int> mult(g.size(), 0);
    while (static_cast<int>(points.size()) < n) {
      int p = static_cast<int>(rng.uniform_below(g.size()));
      if (mult[p] < cap) {
        ++mult[p];
        points.push_back(p);
      }
    }
    const double t = rng.uniform_below(2) == 0 ? 0.3 : 1.0;
    auto report = sep_correlation_check(g, cap, rho, points, t, kEps, jobs);
    ++tally.cases;
    worst = std::min(worst, report.worst_margin);
    if (!report.pass) tally.fail("exclusion case " + std::to_string(i));
  }
  unit.pass = tally.ok;
  std::ostringstream d;
  d << "100 inclusion + 100 exclusion randomized profiles, worst margin "
    << worst;
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_correlation_montecarlo(int jobs, std::uint64_t seed) {
  SuiteUnit unit{"correlation-montecarlo", false, "", 0};
  Tally tally;
  std::ostringstream d;

  {  // inclusion: sampled moment vs exact dual value
    SiteGraph g = SiteGraph::chain(3);
    const Rat m(1);
    std::vector<Rat> lambda = {Rat(1, 3), Rat(1, 2), Rat(1, 4)};
    std::vector<Rat> rho(3);
    for (int x = 0; x < 3; ++x) rho[x] = lambda[x] / (1 - lambda[x]);
    auto measure = ProductMeasureSpec::discrete_gamma(m, lambda);
    const DualConfig xi = {1, 0, 1};
    for (double t : {0.0, 0.4}) {
      auto est = estimate_duality_moment(ProcessSpec::sip(m), g, measure, xi,
                                         t, 10000, seed_stream(seed, 9000),
                                         jobs);
      const double exact =
          dual_moment_table(g, 2 * m, Rat(4), rho, 2, t, kEps, jobs)
              .at({0, 2});
      ++tally.cases;
      const double gap = std::abs(est.mean - exact);
      if (gap > 3 * est.stderr_of_mean + 1e-9)
        tally.fail("inclusion moment t=" + std::to_string(t) + " off by " +
                   std::to_string(gap / std::max(est.stderr_of_mean, 1e-300)) +
                   " sigma");
      if (t > 0) d << "inclusion |mc-exact|/sigma = "
                   << gap / est.stderr_of_mean << "; ";
    }
  }
  {  // exclusion
    SiteGraph g = SiteGraph::cycle(3);
    const long cap = 2;
    std::vector<Rat> rho = {Rat(1, 5), Rat(1, 2), Rat(4, 5)};
    auto measure = ProductMeasureSpec::binomial(cap, rho);
    const DualConfig xi = {0, 1, 1};
    auto est = estimate_duality_moment(ProcessSpec::sep(cap), g, measure, xi,
                                       0.5, 10000, seed_stream(seed, 9001),
                                       jobs);
    const double exact =
        dual_moment_table(g, Rat(cap), Rat(-1), rho, 2, 0.5, kEps, jobs)
            .at({1, 2});
    ++tally.cases;
    const double gap = std::abs(est.mean - exact);
    if (gap > 3 * est.stderr_of_mean + 1e-9)
      tally.fail("exclusion moment off by " +
                 std::to_string(gap / std::max(est.stderr_of_mean, 1e-300)) +
                 " sigma");
    d << "exclusion |mc-exact|/sigma = " << gap / est.stderr_of_mean << "; ";
  }
  {  // empty dual configuration: exactly one, zero spread
    SiteGraph g = SiteGraph::chain(2);
    auto measure = ProductMeasureSpec::discrete_gamma(Rat(1), {Rat(1, 3), Rat(1, 3)});
    auto est = estimate_duality_moment(ProcessSpec::sip(Rat(1)), g, measure,
                                       {0, 0}, 0.3, 100,
                                       seed_stream(seed, 9002), jobs);
    ++tally.cases;
    if (est.mean != 1.0 || est.stderr_of_mean != 0.0)
      tally.fail("empty dual configuration should average exactly 1");
  }
  unit.pass = tally.ok;
  if (!tally.ok) d << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_boundary_exact(int /*jobs*/) {
  SuiteUnit unit{"boundary-exact", false, "", 0};
  Tally tally;
  std::ostringstream deviations;

  // Density profile: affine for every m; matches the straight-line
  // interpolation of the reservoir densities exactly iff 2m = 1.
  for (int N = 2; N <= 6; ++N)
    for (const Rat& m : {Rat(1, 2), Rat(1), Rat(2)}) {
      auto profile = density_profile(N, m, Rat(1, 3), Rat(3, 5));
      ++tally.cases;
      if (profile.max_abs_second_difference != 0)
        tally.fail("profile not affine at N=" + std::to_string(N) +
                   " m=" + rat_str(m));
      if (m == Rat(1, 2)) {
        if (profile.max_interpolation_deviation != 0)
          tally.fail("m=1/2 profile should match the interpolation exactly");
      } else if (N == 4) {
        deviations << " m=" << rat_str(m) << ": deviation "
                   << rat_str(profile.max_interpolation_deviation) << ";";
      }
    }

  // Two- and three-point correlation margins, exact, N <= 6.
  auto run_points = [&](int N, const Rat& m, const Rat& lam_l, const Rat& lam_r,
                        bool expect_equality) {
    const Rat rho_l = lam_l / (1 - lam_l);
    const Rat rho_r = lam_r / (1 - lam_r);
    GeneratorMatrix one_gen = build_absorbing_dual_generator(N, m, 1);
    AbsorptionTable one_tab = absorption_table(one_gen);
    GeneratorMatrix two_gen = build_absorbing_dual_generator(N, m, 2);
    AbsorptionTable two_tab = absorption_table(two_gen);
    std::vector<Rat> single(N + 1);
    for (int i = 1; i <= N; ++i)
      single[i] =
          boundary_steady_moment(one_gen, one_tab, {i}, N, rho_l, rho_r);
    for (int i = 1; i <= N; ++i)
      for (int j = i; j <= N; ++j) {
        Rat margin = boundary_steady_moment(two_gen, two_tab, {i, j}, N,
                                            rho_l, rho_r) -
                     single[i] * single[j];
        ++tally.cases;
        if (expect_equality) {
          if (margin != 0)
            tally.fail("equilibrium margin nonzero at N=" + std::to_string(N));
        } else if (margin <= 0) {
          tally.fail("driven margin not strictly positive at (" +
                     std::to_string(i) + "," + std::to_string(j) + ")");
        }
      }
    if (!expect_equality) {
      GeneratorMatrix three_gen = build_absorbing_dual_generator(N, m, 3);
      AbsorptionTable three_tab = absorption_table(three_gen);
      for (int i = 1; i <= N; ++i)
        for (int j = i; j <= N; ++j)
          for (int k = j; k <= N; ++k) {
            Rat margin = boundary_steady_moment(three_gen, three_tab,
                                                {i, j, k}, N, rho_l, rho_r) -
                         single[i] * single[j] * single[k];
            ++tally.cases;
            if (margin <= 0)
              tally.fail("triple margin not positive at N=" +
                         std::to_string(N));
          }
    }
  };
  run_points(4, Rat(1), Rat(1, 3), Rat(3, 5), false);
  run_points(5, Rat(1, 2), Rat(1, 4), Rat(2, 3), false);
  run_points(6, Rat(2), Rat(1, 3), Rat(3, 5), false);
  run_points(4, Rat(1), Rat(2, 5), Rat(2, 5), true);

  unit.pass = tally.ok;
  std::ostringstream d;
  d << tally.cases << " exact boundary cases; second differences 0; "
    << "interpolation exact at m=1/2, otherwise reported:" << deviations.str();
  if (!tally.ok) d << " " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_boundary_montecarlo(int /*jobs*/, std::uint64_t seed) {
  SuiteUnit unit{"boundary-montecarlo", false, "", 0};
  Tally tally;
  std::ostringstream d;
  {
    const int N = 3;
    const Rat m(1);
    auto spec = ProcessSpec::boundary_driven_sip(m, Rat(1, 3), Rat(3, 5), N);
    auto profile = density_profile(N, m, Rat(1, 3), Rat(3, 5));
    const double exact = to_double(profile.moments[1]);  // site 2
    auto est = stationary_time_average(
        spec,
        [&m](const OccupationConfig& eta) {
          return to_double(sip_d(1, eta[1], m));
        },
        30.0, 430.0, seed_stream(seed, 9100));
    ++tally.cases;
    const double gap = std::abs(est.mean - exact);
    if (gap > 3 * est.stderr_of_mean)
      tally.fail("driven average off by " +
                 std::to_string(gap / std::max(est.stderr_of_mean, 1e-300)) +
                 " sigma");
    d << "driven |avg-exact|/sigma = " << gap / est.stderr_of_mean << "; ";
  }
  {
    const int N = 3;
    const Rat m(1, 2), lambda(2, 5);
    auto spec = ProcessSpec::boundary_driven_sip(m, lambda, lambda, N);
    const double rho = to_double(lambda / (1 - lambda));
    auto est = stationary_time_average(
        spec,
        [&m](const OccupationConfig& eta) {
          return to_double(sip_d(1, eta[0], m));
        },
        30.0, 430.0, seed_stream(seed, 9101));
    ++tally.cases;
    const double gap = std::abs(est.mean - rho);
    if (gap > 3 * est.stderr_of_mean)
      tally.fail("equilibrium average off by " +
                 std::to_string(gap / std::max(est.stderr_of_mean, 1e-300)) +
                 " sigma");
    d << "equilibrium |avg-rho|/sigma = " << gap / est.stderr_of_mean;
  }
  unit.pass = tally.ok;
  if (!tally.ok) d << " " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_measure_identities(int /*jobs*/) {
  SuiteUnit unit{"measure-identities", false, "", 0};
  Tally tally;
  struct ConvCase {
    Rat m, l, lambda;
  };
  for (const auto& c :
       {ConvCase{Rat(2), Rat(2), Rat(1, 2)}, ConvCase{Rat(1), Rat(3), Rat(1, 2)},
        ConvCase{Rat(1, 2), Rat(3, 2), Rat(1, 3)},
        ConvCase{Rat(7, 3), Rat(2, 3), Rat(2, 5)}}) {
    Rat dev = convolution_deviation(c.m, c.l, c.lambda, 50);
    ++tally.cases;
    if (dev != 0)
      tally.fail("convolution deviation " + rat_str(dev) + " at m=" +
                 rat_str(c.m) + " l=" + rat_str(c.l));
  }
  double worst_gap = 0;
  for (const Rat& m : inclusion_params())
    for (const Rat& lambda : {Rat(1, 3), Rat(1, 2)})
      for (long k0 = 1; k0 <= 4; ++k0) {
        auto series = sip_d_moment_series(k0, m, lambda, 1e-13);
        ++tally.cases;
        const double gap = std::abs(series.sum - series.target);
        worst_gap = std::max(worst_gap, gap);
        if (series.tail_bound >= 1e-12)
          tally.fail("tail bound not certified below 1e-12");
        if (gap > 1e-12 * std::max(1.0, std::abs(series.target)))
          tally.fail("duality-moment series off by " + std::to_string(gap));
      }
  unit.pass = tally.ok;
  std::ostringstream d;
  d << "convolution exact to k<=50; moment series vs closed form, worst gap "
    << worst_gap << " with certified tails < 1e-12";
  if (!tally.ok) d << "; " << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_sampler_fit(int /*jobs*/, std::uint64_t seed) {
  SuiteUnit unit{"sampler-fit", false, "", 0};
  Tally tally;
  std::ostringstream d;
  struct Case {
    ProductMeasureSpec spec;
    const char* label;
  };
  std::vector<Case> cases;
  cases.push_back({ProductMeasureSpec::discrete_gamma(Rat(1), {Rat(1, 2)}),
                   "negative-binomial m=1"});
  cases.push_back({ProductMeasureSpec::discrete_gamma(Rat(7, 3), {Rat(1, 3)}),
                   "negative-binomial m=7/3"});
  cases.push_back(
      {ProductMeasureSpec::binomial(3, {Rat(2, 5)}), "binomial n=3"});
  cases.push_back({ProductMeasureSpec::gaussian({Rat(2)}), "gaussian"});
  cases.push_back(
      {ProductMeasureSpec::gamma(Rat(3, 2), {Rat(2)}), "gamma m=3/2"});
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto fit = sampler_goodness_of_fit(cases[i].spec, 0, 100000,
                                       seed_stream(seed, 9200 + i));
    ++tally.cases;
    d << cases[i].label << " p=" << fit.p_value << "; ";
    if (fit.p_value <= 0.001)
      tally.fail(std::string(cases[i].label) + " failed goodness of fit");
  }
  unit.pass = tally.ok;
  if (!tally.ok) d << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit unit_conservation(int jobs, std::uint64_t seed) {
  SuiteUnit unit{"conservation", false, "", 0};
  Tally tally;
  std::ostringstream d;

  {  // momentum diffusion conserves sum of squares to machine precision
    SiteGraph g = SiteGraph::cycle(3);
    for (double dt : {0.01, 0.005}) {
      Rng rng(seed_stream(seed, 9300));
      auto traj = simulate_bmp(g, {1.0, 2.0, -0.5}, 2.0, dt, rng);
      double initial = 0;
      for (double v : traj.states.front()) initial += v * v;
      double worst = 0;
      for (const auto& s : traj.states) {
        double total = 0;
        for (double v : s) total += v * v;
        worst = std::max(worst, std::abs(total - initial) / initial);
      }
      ++tally.cases;
      if (worst > 1e-12)
        tally.fail("momentum drift " + std::to_string(worst) + " at dt=" +
                   std::to_string(dt));
      if (dt == 0.01) d << "momentum rel drift " << worst << "; ";
    }
  }
  {  // energy diffusion conserves the total exactly (exact rational sums)
    SiteGraph g = SiteGraph::chain(3);
    Rng rng(seed_stream(seed, 9301));
    auto traj = simulate_bep(g, {0.02, 1.0, 0.5}, Rat(1), 2.0, 0.01, rng);
    Rat initial = 0;
    for (double v : traj.states.front()) initial += rat_from_double(v);
    bool exact = true;
    for (const auto& s : traj.states) {
      Rat total = 0;
      for (double v : s) total += rat_from_double(v);
      if (total != initial) exact = false;
    }
    ++tally.cases;
    if (!exact) tally.fail("energy total not exactly conserved");
    d << "energy conserved exactly over " << traj.states.size()
      << " steps, clamped " << traj.clamped_steps << "; ";
    // Clamping must become rarer as dt shrinks (pinned seeds).
    Rng rng_a(seed_stream(seed, 9302)), rng_b(seed_stream(seed, 9302));
    auto coarse = simulate_bep(g, {0.02, 1.0, 0.5}, Rat(1), 2.0, 0.02, rng_a);
    auto fine = simulate_bep(g, {0.02, 1.0, 0.5}, Rat(1), 2.0, 0.0025, rng_b);
    const double coarse_rate =
        static_cast<double>(coarse.clamped_steps) / (coarse.states.size() - 1);
    const double fine_rate =
        static_cast<double>(fine.clamped_steps) / (fine.states.size() - 1);
    ++tally.cases;
    if (fine_rate > coarse_rate)
      tally.fail("clamping rate did not shrink with dt");
    d << "clamp rate " << coarse_rate << " -> " << fine_rate << "; ";
  }
  {  // jump processes conserve the particle count exactly
    SiteGraph g = SiteGraph::chain(3);
    Rng rng(seed_stream(seed, 9303));
    auto traj =
        simulate_ctmc(ProcessSpec::sip(Rat(3, 2)), g, {2, 1, 0}, 3.0, rng);
    bool ok = true;
    for (const auto& s : traj.states) ok = ok && total_count(s) == 3;
    Rng rng2(seed_stream(seed, 9304));
    auto traj2 =
        simulate_ctmc(ProcessSpec::sep(2), g, {2, 1, 0}, 3.0, rng2);
    for (const auto& s : traj2.states) {
      ok = ok && total_count(s) == 3;
      for (int c : s) ok = ok && c <= 2;
    }
    ++tally.cases;
    if (!ok) tally.fail("jump conservation violated");
  }
  {  // bit-for-bit reproducibility, independent of the worker count
    SiteGraph g = SiteGraph::chain(3);
    Rng r1(seed_stream(seed, 9305)), r2(seed_stream(seed, 9305));
    auto t1 = simulate_ctmc(ProcessSpec::sip(Rat(1)), g, {2, 0, 1}, 2.0, r1);
    auto t2 = simulate_ctmc(ProcessSpec::sip(Rat(1)), g, {2, 0, 1}, 2.0, r2);
    ++tally.cases;
    if (t1.times != t2.times || t1.states != t2.states)
      tally.fail("same seed produced different trajectories");
    auto measure = ProductMeasureSpec::discrete_gamma(
        Rat(1), {Rat(1, 3), Rat(1, 2), Rat(1, 4)});
    auto e1 = estimate_duality_moment(ProcessSpec::sip(Rat(1)), g, measure,
                                      {1, 0, 1}, 0.3, 400,
                                      seed_stream(seed, 9306), 1);
    auto e4 = estimate_duality_moment(ProcessSpec::sip(Rat(1)), g, measure,
                                      {1, 0, 1}, 0.3, 400,
                                      seed_stream(seed, 9306),
                                      std::max(4, jobs));
    ++tally.cases;
    if (e1.mean != e4.mean || e1.stderr_of_mean != e4.stderr_of_mean)
      tally.fail("estimate depends on the worker count");
  }
  unit.pass = tally.ok;
  if (!tally.ok) d << tally.notes.str();
  unit.detail = d.str();
  return unit;
}

SuiteUnit dispatch_unit(const std::string& unit, int jobs,
                        std::uint64_t seed) {
  if (unit == "sip-self-duality") return unit_sip_self_duality(jobs);
  if (unit == "sep-self-duality") return unit_sep_self_duality(jobs);
  if (unit == "diffusion-duality") return unit_diffusion_duality(jobs);
  if (unit == "boundary-duality") return unit_boundary_duality(jobs);
  if (unit == "comparison") return unit_comparison(jobs, seed);
  if (unit == "detailed-balance") return unit_detailed_balance(jobs);
  if (unit == "correlation-margins") return unit_correlation_margins(jobs, seed);
  if (unit == "correlation-montecarlo")
    return unit_correlation_montecarlo(jobs, seed);
  if (unit == "boundary-exact") return unit_boundary_exact(jobs);
  if (unit == "boundary-montecarlo") return unit_boundary_montecarlo(jobs, seed);
  if (unit == "measure-identities") return unit_measure_identities(jobs);
  if (unit == "sampler-fit") return unit_sampler_fit(jobs, seed);
  if (unit == "conservation") return unit_conservation(jobs, seed);
  throw InvalidParameter("unknown suite unit '" + unit + "'");
}

}  // namespace

SuiteUnit run_unit(const std::string& unit, int jobs, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteUnit result = dispatch_unit(unit, resolve_jobs(jobs), seed);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

std::vector<std::string> preset_units(const std::string& preset) {
  const std::vector<std::string> exact = {
      "sip-self-duality", "sep-self-duality",    "diffusion-duality",
      "boundary-duality", "comparison",          "detailed-balance",
      "correlation-margins", "boundary-exact",   "measure-identities"};
  const std::vector<std::string> stochastic = {
      "correlation-montecarlo", "boundary-montecarlo", "sampler-fit",
      "conservation"};
  if (preset == "paper-exact") return exact;
  if (preset == "paper-stochastic") return stochastic;
  if (preset == "all") {
    std::vector<std::string> all = exact;
    all.insert(all.end(), stochastic.begin(), stochastic.end());
    return all;
  }
  throw InvalidParameter("unknown preset '" + preset +
                         "' (expected paper-exact, paper-stochastic or all)");
}

int criterion_count() { return 10; }

CriterionResult run_criterion(int id, int jobs, std::uint64_t seed) {
  struct Spec {
    const char* name;
    std::vector<const char*> units;
  };
  static const Spec specs[] = {
      {"exact inclusion self-duality", {"sip-self-duality"}},
      {"exact exclusion self-duality", {"sep-self-duality"}},
      {"diffusion dualities", {"diffusion-duality"}},
      {"boundary duality and reservoir rates", {"boundary-duality"}},
      {"comparison inequality", {"comparison"}},
      {"stationarity and reversibility", {"detailed-balance"}},
      {"correlation inequalities",
       {"correlation-margins", "correlation-montecarlo"}},
      {"boundary-driven steady state",
       {"boundary-exact", "boundary-montecarlo"}},
      {"measure identities and samplers",
       {"measure-identities", "sampler-fit"}},
      {"conservation and reproducibility", {"conservation"}},
  };
  if (id < 1 || id > criterion_count())
    throw InvalidParameter("criterion id out of range");
  const Spec& spec = specs[id - 1];
  CriterionResult result;
  result.id = id;
  result.name = spec.name;
  result.pass = true;
  std::ostringstream detail;
  for (const char* unit_name : spec.units) {
    SuiteUnit unit = run_unit(unit_name, jobs, seed);
    result.pass = result.pass && unit.pass;
    result.seconds += unit.seconds;
    if (detail.tellp() > 0) detail << " | ";
    detail << unit.detail;
  }
  result.detail = detail.str();
  return result;
}

}  // namespace dualiscope
