#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dualiscope {

// One unit of the verification battery. Units marked exact decide their
// verdict in exact arithmetic; stochastic units use pinned seeds and
// 3-sigma (or chi-square) acceptance.
struct SuiteUnit {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Known units: sip-self-duality, sep-self-duality, diffusion-duality,
// boundary-duality, comparison, detailed-balance, correlation-margins,
// correlation-montecarlo, boundary-exact, boundary-montecarlo,
// measure-identities, sampler-fit, conservation.
SuiteUnit run_unit(const std::string& unit, int jobs, std::uint64_t seed);

// Presets: paper-exact (deterministic battery), paper-stochastic
// (Monte Carlo battery), all.
std::vector<std::string> preset_units(const std::string& preset);

// The ten acceptance criteria, 1-based; each aggregates one or two units.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};
CriterionResult run_criterion(int id, int jobs, std::uint64_t seed);
int criterion_count();

}  // namespace dualiscope
