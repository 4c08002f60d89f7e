// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one pass/fail line per criterion. Exit status 0 iff all pass.
//
// Environment: DUALISCOPE_JOBS sets the worker count, DUALISCOPE_SEED the
// master seed (default 20240601).

#include <cstdio>
#include <cstdlib>

#include "dualiscope/suite.hpp"

int main() {
  std::uint64_t seed = 20240601;
  if (const char* env = std::getenv("DUALISCOPE_SEED")) seed = std::strtoull(env, nullptr, 10);
  int failures = 0;
  double total_seconds = 0;
  for (int id = 1; id <= dualiscope::criterion_count(); ++id) {
    dualiscope::CriterionResult result;
    try {
      result = dualiscope::run_criterion(id, 0, seed);
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %2d: exception: %s\n", id, e.what());
      ++failures;
      continue;
    }
    std::printf("[%s] criterion %2d: %s — %s (%.1fs)\n",
                result.pass ? "PASS" : "FAIL", id, result.name.c_str(),
                result.detail.c_str(), result.seconds);
    std::fflush(stdout);
    total_seconds += result.seconds;
    if (!result.pass) ++failures;
  }
  std::printf("%d/%d criteria passed in %.1fs\n",
              dualiscope::criterion_count() - failures,
              dualiscope::criterion_count(), total_seconds);
  return failures == 0 ? 0 : 1;
}
