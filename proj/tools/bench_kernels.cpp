// Benchmark of the parallel kernels against their serial reference:
// uniformized matrix powers on a large sector generator, and Monte Carlo
// replica batches. Prints one row per kernel and thread count.

#include <chrono>
#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "dualiscope/generator.hpp"
#include "dualiscope/inequalities.hpp"
#include "dualiscope/montecarlo.hpp"
#include "dualiscope/parallel.hpp"
#include "dualiscope/semigroup.hpp"

using namespace dualiscope;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel benchmark: serial reference vs OpenMP"};
  int jobs = 0;
  int sites = 16;
  long particles = 6;
  long replicas = 20000;
  double t_phys = 0.5;
  app.add_option("--jobs", jobs, "max worker threads (default: OpenMP)");
  app.add_option("--sites", sites, "ring size for the sector generator");
  app.add_option("--particles", particles, "particles in the sector");
  app.add_option("--replicas", replicas, "Monte Carlo replicas");
  app.add_option("--t", t_phys, "physical time for the semigroup benchmark");
  CLI11_PARSE(app, argc, argv);
  jobs = resolve_jobs(jobs);

  SiteGraph ring = SiteGraph::cycle(sites);
  std::printf("building SIP(1) sector generator: %d sites, %ld particles...\n",
              sites, particles);
  auto t0 = std::chrono::steady_clock::now();
  GeneratorMatrix G =
      build_sector_generator(ProcessSpec::sip(Rat(1)), ring, particles);
  UniformizedOperator P = uniformize(G);
  std::printf("  %d states, %zu nonzeros, built in %.2fs\n", G.state_count(),
              P.val.size(), seconds_since(t0));

  std::vector<double> f(G.state_count());
  for (int s = 0; s < G.state_count(); ++s)
    f[s] = static_cast<double>(G.states[s][0]);

  const double eps = 1e-10;
  t0 = std::chrono::steady_clock::now();
  auto serial = semigroup_apply(P, f, t_phys, eps, 1);
  const double serial_time = seconds_since(t0);
  std::printf("semigroup  jobs=1   %8.3fs  (%ld matrix powers)\n", serial_time,
              serial.terms);

  for (int j : {2, 4, jobs}) {
    if (j <= 1) continue;
    t0 = std::chrono::steady_clock::now();
    auto parallel = semigroup_apply(P, f, t_phys, eps, j);
    const double par_time = seconds_since(t0);
    bool identical = parallel.values == serial.values;
    std::printf("semigroup  jobs=%-3d %8.3fs  speedup %.2fx  %s\n", j, par_time,
                serial_time / par_time,
                identical ? "bitwise-identical" : "MISMATCH");
    if (!identical) return 1;
    if (j == jobs) break;
  }

  SiteGraph chain = SiteGraph::chain(4);
  auto measure = ProductMeasureSpec::discrete_gamma(
      Rat(1), {Rat(1, 3), Rat(1, 2), Rat(1, 4), Rat(2, 5)});
  const DualConfig xi = {1, 0, 1, 0};
  std::printf("Monte Carlo duality moment, %ld replicas:\n", replicas);
  t0 = std::chrono::steady_clock::now();
  auto est1 = estimate_duality_moment(ProcessSpec::sip(Rat(1)), chain, measure,
                                      xi, 0.5, replicas, 424242, 1);
  const double mc_serial = seconds_since(t0);
  std::printf("replicas   jobs=1   %8.3fs  mean %.6f\n", mc_serial, est1.mean);
  for (int j : {2, 4, jobs}) {
    if (j <= 1) continue;
    t0 = std::chrono::steady_clock::now();
    auto estj = estimate_duality_moment(ProcessSpec::sip(Rat(1)), chain,
                                        measure, xi, 0.5, replicas, 424242, j);
    const double mc_par = seconds_since(t0);
    bool identical =
        estj.mean == est1.mean && estj.stderr_of_mean == est1.stderr_of_mean;
    std::printf("replicas   jobs=%-3d %8.3fs  speedup %.2fx  %s\n", j, mc_par,
                mc_serial / mc_par,
                identical ? "bitwise-identical" : "MISMATCH");
    if (!identical) return 1;
    if (j == jobs) break;
  }
  return 0;
}
