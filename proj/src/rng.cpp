#include "dualiscope/rng.hpp"

#include <cmath>

#include "dualiscope/errors.hpp"

namespace dualiscope {

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw InvalidParameter("uniform_below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  have_spare_ = true;
  return u * factor;
}

double Rng::exponential() { return -std::log1p(-uniform()); }

double Rng::gamma(double shape, double scale) {
  if (shape <= 0 || scale <= 0)
    throw InvalidParameter("gamma sampler needs positive shape and scale");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^{1/a}.
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return scale * d * v;
  }
}

long Rng::poisson(double mean) {
  if (mean < 0) throw InvalidParameter("negative Poisson mean");
  if (mean > 5e6) throw ResourceError("Poisson mean above the sampler guard");
  long count = 0;
  double total = exponential();
  while (total < mean) {
    ++count;
    total += exponential();
  }
  return count;
}

long Rng::binomial(long n, double p) {
  if (n < 0 || p < 0 || p > 1) throw InvalidParameter("bad binomial parameters");
  long hits = 0;
  for (long i = 0; i < n; ++i)
    if (uniform() < p) ++hits;
  return hits;
}

std::uint64_t seed_stream(std::uint64_t master, std::uint64_t replica) {
  std::uint64_t z = master + (replica + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace dualiscope
