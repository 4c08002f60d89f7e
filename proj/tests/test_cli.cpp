#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dualiscope/experiment.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string data_file(const std::string& name) {
  return std::string(DUALISCOPE_DATA_DIR) + "/" + name;
}

int run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") +
                          std::string(DUALISCOPE_BIN) + " " + args +
                          " > /dev/null 2> /dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json load_config(const std::string& name) {
  std::ifstream is(data_file(name));
  REQUIRE(is);
  json j;
  is >> j;
  return j;
}

}  // namespace

TEST_CASE("library-level experiment dispatch") {
  // verify-duality on a 3-site chain: exit 0, residual exactly zero
  auto result = dualiscope::run_experiment(load_config("verify_sip.json"), -1,
                                           1, false);
  CHECK(result.exit_code == 0);
  CHECK(result.report["verdict"] == "pass");
  CHECK(result.report["max_abs_residual"] == "0");
  CHECK(result.report["schema_version"] == 1);
  CHECK(result.cases_csv.find("self-duality") != std::string::npos);

  // unknown experiment name: config error
  json bad = {{"experiment", "nope"}};
  CHECK(dualiscope::run_experiment(bad, -1, 1, false).exit_code == 2);

  // missing field: config error naming the path
  json missing = {{"experiment", "profile"}, {"m", "1"}};
  auto err = dualiscope::run_experiment(missing, -1, 1, false);
  CHECK(err.exit_code == 2);
  CHECK(err.message.find("$.N") != std::string::npos);

  // empty time grid: config error
  json empty_grid = load_config("sip_correlations.json");
  empty_grid["times"] = json::array();
  CHECK(dualiscope::run_experiment(empty_grid, -1, 1, false).exit_code == 2);

  // asymmetric kernel: config error
  json asym = load_config("verify_sip.json");
  asym["graph"] = {{"sites", {"a", "b"}},
                   {"kernel", {{"0", "1"}, {"1/2", "0"}}}};
  CHECK(dualiscope::run_experiment(asym, -1, 1, false).exit_code == 2);
}

TEST_CASE("comparison experiment accepts an explicit test function") {
  json config = {{"experiment", "comparison"},
                 {"graph", {{"builtin", "chain"}, {"n", 2}}},
                 {"n", 2},
                 {"a", "2"},
                 {"b", "4"},
                 {"times", {0.5}},
                 {"f", {"1", "0", "0", "1"}}};  // I(x = y): PD, passes
  auto ok = dualiscope::run_experiment(config, -1, 1, false);
  CHECK(ok.exit_code == 0);

  // non-PD function: precondition failure -> exit 2 with the message
  config["f"] = {"-1", "0", "0", "-1"};
  auto bad = dualiscope::run_experiment(config, -1, 1, false);
  CHECK(bad.exit_code == 2);
  CHECK(bad.message.find("positive definite") != std::string::npos);
}

TEST_CASE("simulate experiment computes replicated moment estimates") {
  json config = {{"experiment", "simulate"},
                 {"process", {{"variant", "SIP"}, {"m", "1"}}},
                 {"graph", {{"builtin", "chain"}, {"n", 3}}},
                 {"measure",
                  {{"family", "DiscreteGamma"},
                   {"m", "1"},
                   {"profile", {"1/3", "1/2", "1/4"}}}},
                 {"xi", {1, 0, 1}},
                 {"T", 0.3},
                 {"replicas", 400},
                 {"seed", 21}};
  auto result = dualiscope::run_experiment(config, -1, 1, false);
  CHECK(result.exit_code == 0);
  CHECK(result.report["estimate"]["replicas"] == 400);
  CHECK(result.report["estimate"].contains("mean"));
  CHECK(result.report["estimate"].contains("stderr"));
  CHECK(result.report["estimate"].contains("seed"));
  CHECK(result.cases_csv.rfind("mean,stderr,replicas,seed", 0) == 0);
}

TEST_CASE("every experiment rejects a bare config with a named path") {
  for (const char* name :
       {"verify-duality", "comparison", "sip-correlations", "sep-correlations",
        "diffusion-correlations", "boundary", "profile", "meeting", "simulate",
        "sample"}) {
    json config = {{"experiment", name}};
    auto result = dualiscope::run_experiment(config, -1, 1, false);
    CHECK(result.exit_code == 2);
    CHECK(result.message.find("$") != std::string::npos);
    CHECK(result.report["verdict"] == "error");
  }
}

TEST_CASE("profile experiment reports the interpolation mismatch") {
  json config = {{"experiment", "profile"}, {"N", 4},       {"m", "1"},
                 {"lambda_left", "1/3"},    {"lambda_right", "3/5"}};
  auto result = dualiscope::run_experiment(config, -1, 1, false);
  CHECK(result.exit_code == 0);  // affinity holds; mismatch only reported
  CHECK(result.report["interpolation_matches"] == false);

  config["m"] = "1/2";
  auto matched = dualiscope::run_experiment(config, -1, 1, false);
  CHECK(matched.report["interpolation_matches"] == true);
}

TEST_CASE("cli end to end") {
  const fs::path out = fs::temp_directory_path() / "dualiscope_cli_test";
  fs::remove_all(out);

  // run with the experiment named in the config
  CHECK(run_cli("run --config " + data_file("verify_sip.json") + " --out " +
                (out / "a").string()) == 0);
  CHECK(fs::exists(out / "a" / "report.json"));
  CHECK(fs::exists(out / "a" / "cases.csv"));

  // named subcommand form
  CHECK(run_cli("verify-duality --config " + data_file("verify_sip.json") +
                " --out " + (out / "b").string()) == 0);

  // byte-identical reruns at a fixed seed, independent of the worker count
  CHECK(run_cli("sip-correlations --config " +
                data_file("sip_correlations.json") + " --seed 7 --jobs 1 --out " +
                (out / "c1").string()) == 0);
  CHECK(run_cli("sip-correlations --config " +
                data_file("sip_correlations.json") + " --seed 7 --jobs 1 --out " +
                (out / "c2").string()) == 0);
  CHECK(run_cli("sip-correlations --config " +
                data_file("sip_correlations.json") + " --seed 7 --jobs 4 --out " +
                (out / "c4").string()) == 0);
  CHECK(slurp(out / "c1" / "cases.csv") == slurp(out / "c2" / "cases.csv"));
  CHECK(slurp(out / "c1" / "cases.csv") == slurp(out / "c4" / "cases.csv"));

  // parse failure -> exit 2
  const fs::path broken = out / "broken.json";
  fs::create_directories(out);
  std::ofstream(broken) << "{ not json";
  CHECK(run_cli("run --config " + broken.string() + " --out " +
                (out / "d").string()) == 2);

  // missing config file -> exit 2
  CHECK(run_cli("run --config /nonexistent.json") == 2);

  // unknown suite preset -> exit 2
  CHECK(run_cli("suite nonsense --out " + (out / "g").string()) == 2);

  // DUALISCOPE_JOBS env var is accepted as the jobs fallback
  CHECK(run_cli("verify-duality --config " + data_file("verify_sip.json") +
                    " --out " + (out / "h").string(),
                "DUALISCOPE_JOBS=2") == 0);

  // boundary experiment end to end
  CHECK(run_cli("boundary --config " + data_file("boundary.json") +
                " --out " + (out / "e").string()) == 0);
  json report;
  std::ifstream(out / "e" / "report.json") >> report;
  CHECK(report["verdict"] == "pass");
  CHECK(report["schema_version"] == 1);

  // simulate with --dump writes the trajectory stream
  CHECK(run_cli("simulate --config " + data_file("simulate.json") +
                " --seed 3 --dump --out " + (out / "f").string()) == 0);
  CHECK(fs::exists(out / "f" / "dump.csv"));
  CHECK(slurp(out / "f" / "dump.csv").rfind("time,site,value", 0) == 0);

  fs::remove_all(out);
}
