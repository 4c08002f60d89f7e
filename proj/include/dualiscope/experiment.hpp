#pragma once

#include <string>

#include "json.hpp"

namespace dualiscope {

// Outcome of one experiment run. exit_code follows the CLI contract:
// 0 = all verdicts pass, 1 = a check failed (message holds the worst case),
// 2 = configuration problem (message names the offending JSON path).
struct ExperimentResult {
  int exit_code = 2;
  nlohmann::json report;
  std::string cases_csv;
  std::string dump_csv;  // only when the experiment supports --dump
  std::string message;
};

// Executes the experiment named in config["experiment"]:
// verify-duality | comparison | sip-correlations | sep-correlations |
// diffusion-correlations | boundary | profile | meeting | simulate | sample.
// Overrides: seed_override >= 0 replaces config["seed"]; jobs 0 = default;
// dump adds bulk CSV output where the experiment supports it.
ExperimentResult run_experiment(nlohmann::json config, long seed_override,
                                int jobs, bool dump);

// Writes report.json and cases.csv (and dump.csv when present) under
// out_dir, atomically (temp file + rename). Creates the directory.
void write_artifacts(const ExperimentResult& result,
                     const std::string& out_dir);

}  // namespace dualiscope
