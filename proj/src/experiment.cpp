#include "dualiscope/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualiscope/duality.hpp"
#include "dualiscope/errors.hpp"
#include "dualiscope/inequalities.hpp"
#include "dualiscope/montecarlo.hpp"
#include "dualiscope/parallel.hpp"

namespace dualiscope {

namespace {

using nlohmann::json;

constexpr int kReportSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rat rat_at(const json& j, const std::string& path) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (j.is_number_float()) return rat_from_double(j.get<double>());
  throw ConfigError(path + ": expected a rational ('p/q', integer or number)");
}

const json& field(const json& j, const std::string& key,
                  const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing");
  return *it;
}

long int_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number_integer())
    throw ConfigError(path + "." + key + ": expected an integer");
  return v.get<long>();
}

SiteGraph parse_graph(const json& j, const std::string& path,
                      std::vector<std::string>* warnings) {
  SiteGraph g;
  if (j.contains("builtin")) {
    const std::string kind = field(j, "builtin", path).get<std::string>();
    const int n = static_cast<int>(int_field(j, "n", path));
    if (kind == "chain")
      g = SiteGraph::chain(n);
    else if (kind == "cycle")
      g = SiteGraph::cycle(n);
    else if (kind == "complete")
      g = SiteGraph::complete(n);
    else
      throw ConfigError(path + ".builtin: unknown graph '" + kind + "'");
  } else {
    std::vector<std::string> sites;
    for (const auto& s : field(j, "sites", path))
      sites.push_back(s.is_string() ? s.get<std::string>()
                                    : std::to_string(s.get<long>()));
    const json& rows = field(j, "kernel", path);
    std::vector<std::vector<Rat>> kernel;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::vector<Rat> row;
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        row.push_back(rat_at(rows[r][c], path + ".kernel"));
      kernel.push_back(std::move(row));
    }
    try {
      g = SiteGraph(std::move(sites), std::move(kernel));
    } catch (const std::exception& e) {
      throw ConfigError(path + ".kernel: " + e.what());
    }
  }
  auto violations = validate_kernel(g);
  if (!violations.empty()) {
    const bool strict = j.value("strict_kernel", false);
    if (!violations_are_row_sums_only(violations) || strict) {
      std::string all;
      for (const auto& v : violations) all += v + "; ";
      throw ConfigError(path + ".kernel: " + all);
    }
    for (const auto& v : violations)
      warnings->push_back("kernel warning: " + v);
  }
  return g;
}

ProcessSpec parse_process(const json& j, const std::string& path) {
  const std::string variant = field(j, "variant", path).get<std::string>();
  if (variant == "SIP") return ProcessSpec::sip(rat_at(field(j, "m", path), path + ".m"));
  if (variant == "SEP") return ProcessSpec::sep(int_field(j, "n", path));
  if (variant == "GeneralizedAB")
    return ProcessSpec::generalized_ab(rat_at(field(j, "a", path), path + ".a"),
                                       rat_at(field(j, "b", path), path + ".b"));
  if (variant == "IRW")
    return ProcessSpec::irw(rat_at(field(j, "rate", path), path + ".rate"));
  if (variant == "BoundaryDrivenSIP")
    return ProcessSpec::boundary_driven_sip(
        rat_at(field(j, "m", path), path + ".m"),
        rat_at(field(j, "lambda_left", path), path + ".lambda_left"),
        rat_at(field(j, "lambda_right", path), path + ".lambda_right"),
        static_cast<int>(int_field(j, "N", path)));
  throw ConfigError(path + ".variant: unknown process '" + variant + "'");
}

ProductMeasureSpec parse_measure(const json& j, const std::string& path) {
  const std::string family = field(j, "family", path).get<std::string>();
  std::vector<Rat> profile;
  for (const auto& v : field(j, "profile", path))
    profile.push_back(rat_at(v, path + ".profile"));
  if (family == "DiscreteGamma")
    return ProductMeasureSpec::discrete_gamma(
        rat_at(field(j, "m", path), path + ".m"), std::move(profile));
  if (family == "Binomial")
    return ProductMeasureSpec::binomial(int_field(j, "n", path),
                                        std::move(profile));
  if (family == "Gaussian") return ProductMeasureSpec::gaussian(std::move(profile));
  if (family == "Gamma")
    return ProductMeasureSpec::gamma(rat_at(field(j, "m", path), path + ".m"),
                                     std::move(profile));
  throw ConfigError(path + ".family: unknown measure family '" + family + "'");
}

std::vector<Rat> parse_profile(const json& j, const std::string& path) {
  std::vector<Rat> out;
  for (const auto& v : j) out.push_back(rat_at(v, path));
  return out;
}

int site_at(const json& v, const SiteGraph& g, const std::string& path) {
  if (v.is_string()) {
    int idx = g.site_index(v.get<std::string>());
    if (idx < 0)
      throw ConfigError(path + ": unknown site '" + v.get<std::string>() + "'");
    return idx;
  }
  long idx = v.get<long>();
  if (idx < 0 || idx >= g.size())
    throw ConfigError(path + ": site index out of range");
  return static_cast<int>(idx);
}

std::vector<LabeledConfig> parse_point_sets(const json& j, const SiteGraph* g,
                                            const std::string& path) {
  std::vector<LabeledConfig> out;
  if (j.empty()) throw ConfigError(path + ": empty point list");
  auto one = [&](const json& tuple) {
    LabeledConfig points;
    for (const auto& v : tuple)
      points.push_back(g ? site_at(v, *g, path)
                         : static_cast<int>(v.get<long>()));
    return points;
  };
  if (j.front().is_array()) {
    for (const auto& tuple : j) out.push_back(one(tuple));
  } else {
    out.push_back(one(j));
  }
  return out;
}

std::vector<double> parse_times(const json& j, const std::string& path) {
  std::vector<double> out;
  for (const auto& v : j) {
    double t = v.get<double>();
    if (t < 0) throw ConfigError(path + ": negative time");
    out.push_back(t);
  }
  if (out.empty()) throw ConfigError(path + ": empty time grid");
  return out;
}

json report_of(const CheckReport& r) {
  json j{{"name", r.name},
         {"cases_checked", r.cases_checked},
         {"worst_margin", r.worst_margin},
         {"tolerance", r.tolerance},
         {"verdict", r.pass ? "pass" : "fail"}};
  if (!r.worst_case.empty()) j["worst_case"] = r.worst_case;
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct Runner {
  json config;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool dump = false;
  double eps = 1e-12;

  std::vector<json> checks;
  std::vector<std::string> warnings;
  std::ostringstream csv;
  std::ostringstream dump_csv;
  bool all_pass = true;
  std::string worst_failure;

  void add(const CheckReport& r) {
    checks.push_back(report_of(r));
    if (!r.pass) {
      all_pass = false;
      if (worst_failure.empty())
        worst_failure = r.name + " worst case " + r.worst_case + " margin " +
                        std::to_string(r.worst_margin);
    }
  }

  void csv_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      csv << (i ? "," : "") << csv_escape(cells[i]);
    csv << "\n";
  }

  ExperimentResult finish(const std::string& experiment, json extras = {}) {
    ExperimentResult result;
    result.exit_code = all_pass ? 0 : 1;
    result.report = json{{"schema_version", kReportSchemaVersion},
                         {"experiment", experiment},
                         {"seed", seed},
                         {"verdict", all_pass ? "pass" : "fail"},
                         {"checks", checks}};
    if (!warnings.empty()) result.report["warnings"] = warnings;
    if (!extras.is_null() && !extras.empty())
      result.report.update(extras);
    result.cases_csv = csv.str();
    result.dump_csv = dump_csv.str();
    result.message = all_pass ? "all checks passed" : worst_failure;
    return result;
  }
};

ExperimentResult run_verify_duality(Runner& r) {
  const json& config = r.config;
  const std::string family = field(config, "family", "$").get<std::string>();
  const int max_dual = static_cast<int>(config.value("max_dual", 3));
  // Boundary scans grow quickly with the occupancy box; default to 3 there.
  const int max_occ = static_cast<int>(
      config.value("max_occupancy", family == "boundary" ? 3 : 4));
  r.csv << "case,family,graph,cases,max_abs_residual,verdict\n";
  json extras;
  long total_cases = 0;
  Rat worst = 0;
  std::string graph_name;

  auto record = [&](const std::string& label, const std::string& gname,
                    long cases, const Rat& residual) {
    total_cases += cases;
    if (rat_abs(residual) > worst) worst = rat_abs(residual);
    const bool ok = residual == 0;
    if (!ok) {
      r.all_pass = false;
      if (r.worst_failure.empty())
        r.worst_failure = label + " residual " + rat_str(residual);
    }
    r.csv_row({label, family, gname, std::to_string(cases), rat_str(residual),
               ok ? "pass" : "fail"});
    r.checks.push_back(json{{"name", label},
                            {"cases_checked", cases},
                            {"worst_margin", -to_double(rat_abs(residual))},
                            {"tolerance", 0.0},
                            {"verdict", ok ? "pass" : "fail"}});
  };

  if (family == "SIP" || family == "SEP") {
    SiteGraph g = parse_graph(field(config, "graph", "$"), "$.graph",
                              &r.warnings);
    graph_name = std::to_string(g.size()) + "-site";
    ProcessSpec spec =
        family == "SIP"
            ? ProcessSpec::sip(rat_at(field(config, "m", "$"), "$.m"))
            : ProcessSpec::sep(int_field(config, "n", "$"));
    auto scan = scan_self_duality(spec, g, max_dual, max_occ);
    record(spec.name() + " self-duality", graph_name, scan.cases,
           scan.max_abs_residual);
  } else if (family == "BMP" || family == "BEP") {
    SiteGraph g = parse_graph(field(config, "graph", "$"), "$.graph",
                              &r.warnings);
    graph_name = std::to_string(g.size()) + "-site";
    const Rat m = family == "BEP" ? rat_at(field(config, "m", "$"), "$.m")
                                  : Rat(1);
    auto scan = scan_diffusion_duality(
        family == "BMP" ? DiffusionFamily::Bmp : DiffusionFamily::Bep, m, g,
        max_dual);
    record(family + " duality", graph_name, scan.cases, scan.max_abs_residual);
    if (scan.scale_hint != 1)
      extras["uniform_scale_hint"] = rat_str(scan.scale_hint);
  } else if (family == "boundary") {
    ProcessSpec spec = parse_process(field(config, "process", "$"), "$.process");
    if (spec.kind != ProcessSpec::Kind::BoundaryDrivenSip)
      throw ConfigError("$.process: boundary family needs BoundaryDrivenSIP");
    graph_name = "chain-" + std::to_string(spec.chain_length);
    auto scan = scan_boundary_duality(spec, max_dual, max_occ);
    record(spec.name() + " duality", graph_name, scan.cases,
           scan.max_abs_residual);
    Rat worst_identity = 0;
    for (long n = 0; n <= 10; ++n)
      for (long k = 0; k <= n; ++k) {
        Rat left = boundary_rate_identity_residual(k, n, spec.m,
                                                   spec.lambda_left);
        Rat right = boundary_rate_identity_residual(k, n, spec.m,
                                                    spec.lambda_right);
        worst_identity =
            std::max({worst_identity, rat_abs(left), rat_abs(right)});
      }
    record("reservoir-rate identity k<=n<=10", graph_name, 2 * 66,
           worst_identity);
  } else {
    throw ConfigError("$.family: unknown duality family '" + family + "'");
  }

  extras["family"] = family;
  extras["graph"] = graph_name;
  extras["max_abs_residual"] = rat_str(worst);
  extras["cases_checked"] = total_cases;
  return r.finish("verify-duality", extras);
}

ExperimentResult run_comparison(Runner& r) {
  const json& config = r.config;
  SiteGraph g = parse_graph(field(config, "graph", "$"), "$.graph", &r.warnings);
  const int n = static_cast<int>(int_field(config, "n", "$"));
  const Rat a = rat_at(field(config, "a", "$"), "$.a");
  const Rat b = rat_at(field(config, "b", "$"), "$.b");
  auto times = parse_times(field(config, "times", "$"), "$.times");
  r.csv << "case,function,t,worst_margin,tolerance,verdict\n";

  // Either an explicit test function table or seeded random PD functions.
  std::vector<PDFunction> functions;
  std::vector<std::string> labels;
  if (config.contains("f")) {
    std::vector<Rat> values;
    for (const auto& v : field(config, "f", "$")) values.push_back(rat_at(v, "$.f"));
    try {
      functions.push_back(
          PDFunction::from_exact(g.size(), n, std::move(values)));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("$.f: ") + e.what());
    }
    labels.push_back("explicit");
  } else {
    const long count = config.value("functions", 20);
    for (long fi = 0; fi < count; ++fi) {
      Rng rng(seed_stream(r.seed, fi));
      functions.push_back(random_pd_function(g.size(), n, rng));
      labels.push_back(std::to_string(fi));
    }
  }
  for (std::size_t fi = 0; fi < functions.size(); ++fi)
    for (double t : times) {
      // Hypothesis violations (asymmetric or non-PD f) surface as
      // configuration errors with the precondition message.
      CheckReport report;
      try {
        report = comparison_check(g, n, a, b, functions[fi], t, r.eps, r.jobs);
      } catch (const PreconditionError& e) {
        throw ConfigError(std::string("$.f: ") + e.what());
      }
      r.add(report);
      r.csv_row({report.name, labels[fi], std::to_string(t),
                 std::to_string(report.worst_margin),
                 std::to_string(report.tolerance),
                 report.pass ? "pass" : "fail"});
    }
  return r.finish("comparison");
}

ExperimentResult run_correlations(Runner& r, const std::string& which) {
  const json& config = r.config;
  SiteGraph g = parse_graph(field(config, "graph", "$"), "$.graph", &r.warnings);
  auto times = parse_times(field(config, "times", "$"), "$.times");
  auto point_sets =
      parse_point_sets(field(config, "points", "$"), &g, "$.points");
  r.csv << "case,points,t,worst_margin,tolerance,verdict\n";
  for (const auto& points : point_sets)
    for (double t : times) {
      CheckReport report;
      if (which == "sip") {
        report = sip_correlation_check(
            g, rat_at(field(config, "m", "$"), "$.m"),
            parse_profile(field(config, "lambda", "$"), "$.lambda"), points, t,
            r.eps, r.jobs);
      } else if (which == "sep") {
        report = sep_correlation_check(
            g, int_field(config, "n", "$"),
            parse_profile(field(config, "rho", "$"), "$.rho"), points, t,
            r.eps, r.jobs);
      } else {
        const std::string fam = field(config, "family", "$").get<std::string>();
        if (fam != "BMP" && fam != "BEP")
          throw ConfigError("$.family: expected BMP or BEP");
        report = diffusion_correlation_check(
            fam == "BMP" ? DiffusionCorrelationFamily::Bmp
                         : DiffusionCorrelationFamily::Bep,
            fam == "BEP" ? rat_at(field(config, "m", "$"), "$.m") : Rat(1), g,
            parse_profile(field(config, "profile", "$"), "$.profile"), points,
            t, r.eps, r.jobs);
      }
      r.add(report);
      std::ostringstream pts;
      for (std::size_t i = 0; i < points.size(); ++i)
        pts << (i ? " " : "") << points[i];
      r.csv_row({report.name, pts.str(), std::to_string(t),
                 std::to_string(report.worst_margin),
                 std::to_string(report.tolerance),
                 report.pass ? "pass" : "fail"});
    }
  return r.finish(which == "sip"   ? "sip-correlations"
                  : which == "sep" ? "sep-correlations"
                                   : "diffusion-correlations");
}

ExperimentResult run_boundary(Runner& r) {
  const json& config = r.config;
  const int N = static_cast<int>(int_field(config, "N", "$"));
  const Rat m = rat_at(field(config, "m", "$"), "$.m");
  const Rat lam_l = rat_at(field(config, "lambda_left", "$"), "$.lambda_left");
  const Rat lam_r = rat_at(field(config, "lambda_right", "$"), "$.lambda_right");
  auto point_sets =
      parse_point_sets(field(config, "points", "$"), nullptr, "$.points");
  r.csv << "case,points,margin,verdict\n";
  for (const auto& points : point_sets) {
    CheckReport report = boundary_correlation_check(N, m, lam_l, lam_r, points);
    r.add(report);
    std::ostringstream pts;
    for (std::size_t i = 0; i < points.size(); ++i)
      pts << (i ? " " : "") << points[i];
    r.csv_row({report.name, pts.str(), std::to_string(report.worst_margin),
               report.pass ? "pass" : "fail"});
  }
  return r.finish("boundary");
}

ExperimentResult run_profile(Runner& r) {
  const json& config = r.config;
  const int N = static_cast<int>(int_field(config, "N", "$"));
  const Rat m = rat_at(field(config, "m", "$"), "$.m");
  const Rat lam_l = rat_at(field(config, "lambda_left", "$"), "$.lambda_left");
  const Rat lam_r = rat_at(field(config, "lambda_right", "$"), "$.lambda_right");
  auto profile = density_profile(N, m, lam_l, lam_r);
  r.csv << "site,moment,interpolation,deviation\n";
  json moments = json::array(), interp = json::array();
  for (int i = 0; i < N; ++i) {
    r.csv_row({std::to_string(i + 1), rat_str(profile.moments[i]),
               rat_str(profile.interpolation[i]),
               rat_str(profile.moments[i] - profile.interpolation[i])});
    moments.push_back(rat_str(profile.moments[i]));
    interp.push_back(rat_str(profile.interpolation[i]));
  }
  CheckReport affine = make_report(
      "profile affine (second differences)", N >= 3 ? N - 2 : 0,
      -to_double(profile.max_abs_second_difference), 0.0);
  affine.pass = profile.max_abs_second_difference == 0;
  r.add(affine);
  json extras{{"moments", moments},
              {"interpolation", interp},
              {"max_interpolation_deviation",
               rat_str(profile.max_interpolation_deviation)},
              {"interpolation_matches",
               profile.max_interpolation_deviation == 0}};
  return r.finish("profile", extras);
}

ExperimentResult run_meeting(Runner& r) {
  const json& config = r.config;
  SiteGraph g = parse_graph(field(config, "graph", "$"), "$.graph", &r.warnings);
  const Rat m = rat_at(field(config, "m", "$"), "$.m");
  auto starts = parse_point_sets(field(config, "start", "$"), &g, "$.start");
  auto times = parse_times(field(config, "times", "$"), "$.times");
  r.csv << "t,meet_probability,pair_moment_sum,dual_moment_sum,occupancy_"
           "bound,walker_bound,ordered\n";
  auto rows = meeting_probability_report(g, m, starts.front(), times, r.eps,
                                         r.jobs);
  bool all_ordered = true;
  for (const auto& row : rows) {
    all_ordered = all_ordered && row.ordered;
    r.csv_row({std::to_string(row.t), std::to_string(row.meet_probability),
               std::to_string(row.pair_moment_sum),
               std::to_string(row.dual_moment_sum),
               std::to_string(row.occupancy_bound),
               std::to_string(row.walker_bound),
               row.ordered ? "pass" : "fail"});
  }
  CheckReport chain = make_report("meeting bound chain ordering",
                                  static_cast<long>(rows.size()),
                                  all_ordered ? 0.0 : -1.0, 0.0);
  r.add(chain);
  return r.finish("meeting");
}

// Diffusion runs: conservation diagnostics on one trajectory.
ExperimentResult run_simulate_diffusion(Runner& r, const std::string& family) {
  const json& config = r.config;
  const json& proc = field(config, "process", "$");
  const double horizon = field(config, "T", "$").get<double>();
  const double dt = field(config, "dt", "$").get<double>();
  SiteGraph g =
      parse_graph(field(config, "graph", "$"), "$.graph", &r.warnings);
  std::vector<double> start;
  for (const auto& v : field(config, "start", "$"))
    start.push_back(v.get<double>());
  Rng rng(r.seed);
  DiffusionTrajectory traj;
  bool conserved = true;
  double drift = 0;
  if (family == "BMP") {
    traj = simulate_bmp(g, start, horizon, dt, rng);
    double initial = 0;
    for (double v : traj.states.front()) initial += v * v;
    for (const auto& s : traj.states) {
      double total = 0;
      for (double v : s) total += v * v;
      drift = std::max(drift, std::abs(total - initial));
    }
    conserved = initial == 0 ? drift == 0 : drift <= 1e-12 * initial;
  } else {
    traj = simulate_bep(g, start,
                        rat_at(field(proc, "m", "$.process"), "$.process.m"),
                        horizon, dt, rng);
    Rat initial = 0;
    for (double v : traj.states.front()) initial += rat_from_double(v);
    for (const auto& s : traj.states) {
      Rat total = 0;
      for (double v : s) total += rat_from_double(v);
      if (total != initial) conserved = false;
    }
  }
  r.csv << "step,time,conserved_total\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    double total = 0;
    for (double v : traj.states[k])
      total += family == "BMP" ? v * v : v;
    r.csv_row({std::to_string(k), std::to_string(traj.times[k]),
               std::to_string(total)});
  }
  if (r.dump) {
    r.dump_csv << "time,site,value\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      for (std::size_t x = 0; x < traj.states[k].size(); ++x)
        r.dump_csv << traj.times[k] << "," << x << "," << traj.states[k][x]
                   << "\n";
  }
  CheckReport conservation = make_report(
      family == "BMP" ? "sum of squares conserved (machine precision)"
                      : "total energy conserved exactly",
      static_cast<long>(traj.states.size()), conserved ? 0.0 : -1.0, 0.0);
  r.add(conservation);
  json extras{{"steps", traj.states.size() - 1},
              {"clamped_steps", traj.clamped_steps},
              {"final_state", traj.final_state()}};
  return r.finish("simulate", extras);
}

ExperimentResult run_simulate(Runner& r) {
  const json& config = r.config;
  {
    const std::string variant =
        field(field(config, "process", "$"), "variant", "$.process")
            .get<std::string>();
    if (variant == "BMP" || variant == "BEP")
      return run_simulate_diffusion(r, variant);
  }
  ProcessSpec spec = parse_process(field(config, "process", "$"), "$.process");
  const double horizon = field(config, "T", "$").get<double>();

  // Replicated duality-moment estimation: sample the initial configuration
  // from the measure, evolve to T, average D(xi, eta_T).
  if (config.contains("xi") && config.contains("measure")) {
    ProductMeasureSpec measure =
        parse_measure(field(config, "measure", "$"), "$.measure");
    DualConfig xi;
    for (const auto& v : field(config, "xi", "$"))
      xi.push_back(static_cast<int>(v.get<long>()));
    const long replicas = int_field(config, "replicas", "$");
    SiteGraph g =
        parse_graph(field(config, "graph", "$"), "$.graph", &r.warnings);
    Estimate est = estimate_duality_moment(spec, g, measure, xi, horizon,
                                           replicas, r.seed, r.jobs);
    r.csv << "mean,stderr,replicas,seed\n";
    r.csv_row({std::to_string(est.mean), std::to_string(est.stderr_of_mean),
               std::to_string(est.replicas), std::to_string(est.seed)});
    CheckReport finite = make_report("estimate computed", est.replicas,
                                     std::isfinite(est.mean) ? 0.0 : -1.0, 0.0);
    r.add(finite);
    json extras{{"estimate",
                 json{{"mean", est.mean},
                      {"stderr", est.stderr_of_mean},
                      {"replicas", est.replicas},
                      {"seed", est.seed}}}};
    return r.finish("simulate", extras);
  }
  SiteGraph g =
      spec.kind == ProcessSpec::Kind::BoundaryDrivenSip
          ? SiteGraph::chain(spec.chain_length)
          : parse_graph(field(config, "graph", "$"), "$.graph", &r.warnings);
  OccupationConfig start;
  for (const auto& v : field(config, "start", "$"))
    start.push_back(static_cast<int>(v.get<long>()));
  Rng rng(r.seed);
  auto traj = simulate_ctmc(spec, g, start, horizon, rng, true);
  bool conserved = true;
  if (spec.conservative()) {
    const long total = total_count(start);
    for (const auto& s : traj.states)
      conserved = conserved && total_count(s) == total;
  }
  r.csv << "jump,time,total\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    r.csv_row({std::to_string(k), std::to_string(traj.times[k]),
               std::to_string(total_count(traj.states[k]))});
  if (r.dump) {
    r.dump_csv << "time,site,value\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k)
      for (std::size_t x = 0; x < traj.states[k].size(); ++x)
        r.dump_csv << traj.times[k] << "," << x << ","
                   << traj.states[k][x] << "\n";
  }
  CheckReport conservation =
      make_report("particle count conserved", traj.jumps(),
                  conserved ? 0.0 : -1.0, 0.0);
  if (!spec.conservative())
    conservation.notes.push_back("driven chain: count not conserved by design");
  r.add(conservation);
  json extras{{"jumps", traj.jumps()},
              {"final_state", traj.final_state()}};
  return r.finish("simulate", extras);
}

ExperimentResult run_sample(Runner& r) {
  const json& config = r.config;
  ProductMeasureSpec measure =
      parse_measure(field(config, "measure", "$"), "$.measure");
  const long draws = int_field(config, "draws", "$");
  if (draws < 1) throw ConfigError("$.draws: need at least one draw");
  Rng rng(r.seed);
  r.csv << "draw,site,value\n";
  std::vector<double> mean(measure.sites(), 0.0);
  for (long d = 0; d < draws; ++d) {
    auto sample = sample_product(measure, rng);
    for (int x = 0; x < measure.sites(); ++x) {
      mean[x] += sample[x];
      if (r.dump || draws <= 10000)
        r.csv_row({std::to_string(d), std::to_string(x),
                   std::to_string(sample[x])});
    }
  }
  json means = json::array();
  for (int x = 0; x < measure.sites(); ++x)
    means.push_back(mean[x] / static_cast<double>(draws));
  ChiSquareReport fit =
      sampler_goodness_of_fit(measure, 0, std::max(draws, 100L), r.seed + 1);
  CheckReport gof = make_report("sampler goodness of fit (site 0)", fit.draws,
                                fit.p_value - 0.001, 0.0);
  gof.notes.push_back("p_value=" + std::to_string(fit.p_value));
  r.add(gof);
  json extras{{"family", measure.family_name()},
              {"empirical_means", means},
              {"chi_square_p_value", fit.p_value}};
  return r.finish("sample", extras);
}

}  // namespace

ExperimentResult run_experiment(nlohmann::json config, long seed_override,
                                int jobs, bool dump) {
  ExperimentResult error_result;
  Runner runner;
  try {
    runner.config = std::move(config);
    runner.seed =
        seed_override >= 0
            ? static_cast<std::uint64_t>(seed_override)
            : runner.config.value("seed", 12345UL);
    runner.jobs = resolve_jobs(jobs);
    runner.dump = dump;
    if (runner.config.contains("tolerances"))
      runner.eps =
          runner.config["tolerances"].value("uniformization", 1e-12);
    const std::string experiment =
        field(runner.config, "experiment", "$").get<std::string>();

    ExperimentResult result;
    if (experiment == "verify-duality")
      result = run_verify_duality(runner);
    else if (experiment == "comparison")
      result = run_comparison(runner);
    else if (experiment == "sip-correlations")
      result = run_correlations(runner, "sip");
    else if (experiment == "sep-correlations")
      result = run_correlations(runner, "sep");
    else if (experiment == "diffusion-correlations")
      result = run_correlations(runner, "diffusion");
    else if (experiment == "boundary")
      result = run_boundary(runner);
    else if (experiment == "profile")
      result = run_profile(runner);
    else if (experiment == "meeting")
      result = run_meeting(runner);
    else if (experiment == "simulate")
      result = run_simulate(runner);
    else if (experiment == "sample")
      result = run_sample(runner);
    else
      throw ConfigError("$.experiment: unknown experiment '" + experiment +
                        "'");
    result.report["jobs"] = runner.jobs;
    return result;
  } catch (const ConfigError& e) {
    error_result.exit_code = 2;
    error_result.message = e.what();
    error_result.report = json{{"schema_version", kReportSchemaVersion},
                               {"verdict", "error"},
                               {"error", e.what()}};
    return error_result;
  } catch (const std::invalid_argument& e) {
    // Validation and precondition failures map to configuration errors.
    error_result.exit_code = 2;
    error_result.message = e.what();
    error_result.report = json{{"schema_version", kReportSchemaVersion},
                               {"verdict", "error"},
                               {"error", e.what()}};
    return error_result;
  } catch (const std::exception& e) {
    error_result.exit_code = 2;
    error_result.message = e.what();
    error_result.report = json{{"schema_version", kReportSchemaVersion},
                               {"verdict", "error"},
                               {"error", e.what()}};
    return error_result;
  }
}

void write_artifacts(const ExperimentResult& result,
                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto atomic_write = [&](const std::string& name, const std::string& body) {
    const fs::path final_path = fs::path(out_dir) / name;
    const fs::path temp_path = fs::path(out_dir) / (name + ".tmp");
    {
      std::ofstream os(temp_path, std::ios::binary | std::ios::trunc);
      os << body;
    }
    fs::rename(temp_path, final_path);
  };
  atomic_write("report.json", result.report.dump(2) + "\n");
  atomic_write("cases.csv", result.cases_csv);
  if (!result.dump_csv.empty()) atomic_write("dump.csv", result.dump_csv);
}

}  // namespace dualiscope
