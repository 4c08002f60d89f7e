#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dualiscope/experiment.hpp"
#include "dualiscope/parallel.hpp"
#include "dualiscope/suite.hpp"
#include "json.hpp"

namespace {

using dualiscope::ExperimentResult;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  long seed = -1;
  int jobs = 0;
  bool dump = false;
};

int run_config(const CommonOpts& opts, const std::string& forced_experiment) {
  nlohmann::json config;
  {
    std::ifstream is(opts.config_path);
    if (!is) {
      std::cerr << "error: cannot open config '" << opts.config_path << "'\n";
      return 2;
    }
    try {
      is >> config;
    } catch (const std::exception& e) {
      std::cerr << "error: config parse failed: " << e.what() << "\n";
      return 2;
    }
  }
  if (!forced_experiment.empty()) config["experiment"] = forced_experiment;
  ExperimentResult result =
      dualiscope::run_experiment(config, opts.seed, opts.jobs, opts.dump);
  try {
    dualiscope::write_artifacts(result, opts.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: writing artifacts failed: " << e.what() << "\n";
    return 2;
  }
  if (result.exit_code == 0) {
    std::cout << "pass: " << result.message << " (report in " << opts.out_dir
              << ")\n";
  } else {
    std::cerr << (result.exit_code == 2 ? "error: " : "FAIL: ")
              << result.message << "\n";
  }
  return result.exit_code;
}

int run_suite(const std::string& preset, const CommonOpts& opts) {
  std::vector<std::string> units;
  try {
    units = dualiscope::preset_units(preset);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const std::uint64_t seed = opts.seed >= 0 ? opts.seed : 20240601;
  nlohmann::json unit_reports = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& name : units) {
    auto unit = dualiscope::run_unit(name, opts.jobs, seed);
    all_pass = all_pass && unit.pass;
    std::cout << (unit.pass ? "[PASS] " : "[FAIL] ") << unit.name << ": "
              << unit.detail << " (" << unit.seconds << "s)\n";
    unit_reports.push_back({{"name", unit.name},
                            {"verdict", unit.pass ? "pass" : "fail"},
                            {"detail", unit.detail},
                            {"seconds", unit.seconds}});
  }
  ExperimentResult result;
  result.exit_code = all_pass ? 0 : 1;
  result.report = nlohmann::json{{"schema_version", 1},
                                 {"experiment", "suite"},
                                 {"preset", preset},
                                 {"seed", seed},
                                 {"verdict", all_pass ? "pass" : "fail"},
                                 {"units", unit_reports}};
  result.cases_csv = "unit,verdict,seconds\n";
  for (const auto& u : unit_reports)
    result.cases_csv += u["name"].get<std::string>() + "," +
                        u["verdict"].get<std::string>() + "," +
                        std::to_string(u["seconds"].get<double>()) + "\n";
  try {
    dualiscope::write_artifacts(result, opts.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: writing artifacts failed: " << e.what() << "\n";
    return 2;
  }
  std::cout << (all_pass ? "suite passed" : "suite FAILED") << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dualiscope: duality, comparison and correlation checks for "
      "inclusion/exclusion particle systems and their dual diffusions"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string preset;

  auto add_common = [&opts](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
          ->required();
    cmd->add_option("--out", opts.out_dir, "output directory (default: out)");
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--jobs", opts.jobs,
                    "worker threads (default: DUALISCOPE_JOBS or OpenMP)");
    cmd->add_flag("--dump", opts.dump, "write bulk dump.csv where supported");
  };

  // `run` takes the experiment name from the config; the named subcommands
  // force it, so `dualiscope verify-duality --config c.json` also works.
  add_common(app.add_subcommand("run", "run the experiment named in --config"),
             true);
  const char* experiments[] = {
      "verify-duality",      "comparison",  "sip-correlations",
      "sep-correlations",    "diffusion-correlations",
      "boundary",            "profile",     "meeting",
      "simulate",            "sample"};
  for (const char* name : experiments)
    add_common(app.add_subcommand(name, std::string("run a ") + name +
                                            " experiment from --config"),
               true);
  auto* suite_cmd =
      app.add_subcommand("suite", "run a verification battery preset");
  suite_cmd->add_option("preset", preset,
                        "paper-exact | paper-stochastic | all")
      ->required();
  add_common(suite_cmd, false);

  CLI11_PARSE(app, argc, argv);

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (name == "suite") return run_suite(preset, opts);
  if (name == "run") return run_config(opts, "");
  return run_config(opts, name);
}
