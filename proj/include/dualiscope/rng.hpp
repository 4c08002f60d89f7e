#pragma once

#include <cstdint>
#include <random>

namespace dualiscope {

// Deterministic random stream. The engine is std::mt19937_64 (its output
// sequence is pinned by the standard) and every distribution transform is
// implemented here explicitly, so identical seeds give identical draws on
// any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection sampled (unbiased).
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via the polar method (one spare cached).
  double normal();

  // Exponential with unit mean.
  double exponential();

  // Marsaglia-Tsang, with the shape < 1 boost step.
  double gamma(double shape, double scale);

  // Exponential-race count; exact in distribution, O(mean) time.
  long poisson(double mean);

  long binomial(long n, double p);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0;
};

// Replica r of a master seed draws from seed_stream(master, r):
// splitmix64 finalizer applied to master + (r+1) * golden-gamma. Documented
// so runs are reproducible across machines and thread counts.
std::uint64_t seed_stream(std::uint64_t master, std::uint64_t replica);

}  // namespace dualiscope
