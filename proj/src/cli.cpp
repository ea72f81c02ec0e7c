#include "sdelab/cli.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdelab/asymptotics.hpp"
#include "sdelab/integrator.hpp"
#include "sdelab/io.hpp"
#include "sdelab/lyapunov.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/scenarios.hpp"
#include "sdelab/stats.hpp"
#include "sdelab/version.hpp"

namespace sdelab {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitCertificate = 4;
constexpr int kExitAnalysis = 5;

int default_thread_count() {
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(std::min(h, 256u));
}

struct RunOptions {
  std::string scenario;
  std::string config_path;
  std::string out_dir;
  int paths = 64;
  double t_end = 1e4;
  double dt_max = 0.1;
  int save_paths = 4;
  int threads = default_thread_count();
  bool seed_set = false;
  std::uint64_t seed = 0;
};

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Scenario load_scenario(const RunOptions& o) {
  if (!o.scenario.empty() && !o.config_path.empty())
    throw std::invalid_argument("give exactly one of --scenario and --config");
  if (!o.scenario.empty()) return registry_lookup(o.scenario);
  if (!o.config_path.empty()) return read_scenario_config(read_text_file(o.config_path));
  throw std::invalid_argument("one of --scenario or --config is required");
}

std::uint64_t resolve_seed(const RunOptions& o, const Scenario& s) {
  if (o.seed_set) return o.seed;
  if (const char* env = std::getenv("SDELAB_SEED")) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || env[0] == '-')
      throw std::invalid_argument("SDELAB_SEED must be a non-negative integer, got '" +
                                  std::string(env) + "'");
    return v;
  }
  return s.default_seed;
}

// Canonical run description hashed into every artifact.  Thread count is
// deliberately absent: outputs are bit-identical across thread counts.
std::string canonical_config(const Scenario& s, const RunOptions& o, std::uint64_t seed) {
  std::ostringstream ss;
  ss << "scenario=" << s.name << ";x0=";
  for (int i = 0; i < s.x0.size(); ++i) ss << (i ? "," : "") << format_double(s.x0[i]);
  ss << ";paths=" << o.paths << ";t_end=" << format_double(o.t_end)
     << ";dt_max=" << format_double(o.dt_max) << ";seed=" << seed;
  return ss.str();
}

json meta_json(const Scenario& s, const std::string& cfg, std::uint64_t seed) {
  json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["scenario"] = s.name;
  j["seed"] = seed;
  j["config_hash"] = hex64(fnv1a64(cfg));
  return j;
}

void dump_json(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

struct RunArtifacts {
  Scenario scenario;
  std::uint64_t seed = 0;
  StepSchedule sched;
  Ensemble ens;
  EnsembleSummary summary;
  std::string cfg;
};

RunArtifacts run_ensemble(const RunOptions& o) {
  RunArtifacts ra;
  ra.scenario = load_scenario(o);
  ra.seed = resolve_seed(o, ra.scenario);
  ra.sched = default_schedule(o.t_end, o.dt_max);
  ra.cfg = canonical_config(ra.scenario, o, ra.seed);
  EnsembleOptions eopts;
  eopts.threads = o.threads;
  ra.ens = run_scenario_ensemble(ra.scenario, o.paths, ra.sched, ra.seed, eopts);
  ra.summary = summarize_ensemble(ra.ens, eopts);
  return ra;
}

json fit_json(const ExponentFit& f) {
  json j;
  j["slope"] = f.valid() ? num_or_null(f.slope) : json(nullptr);
  j["intercept"] = f.valid() ? num_or_null(f.intercept) : json(nullptr);
  j["stderr"] = f.valid() ? num_or_null(f.stderr_) : json(nullptr);
  j["paths_used"] = f.paths_used;
  j["paths_excluded"] = f.paths_excluded;
  return j;
}

int cmd_simulate(const RunOptions& o, std::ostream& out) {
  RunArtifacts ra = run_ensemble(o);
  ensure_directory(o.out_dir);
  ensure_directory(o.out_dir + "/paths");
  const std::size_t n_save =
      std::min(ra.ens.paths.size(), static_cast<std::size_t>(o.save_paths));
  for (std::size_t p = 0; p < n_save; ++p) {
    char name[32];
    std::snprintf(name, sizeof(name), "path_%05zu.csv", p);
    std::ostringstream csv;
    write_trajectory_csv(csv, ra.ens.paths[p]);
    write_text_file(o.out_dir + "/paths/" + name, csv.str());
  }
  Scenario echo = ra.scenario;
  echo.default_seed = ra.seed;
  write_text_file(o.out_dir + "/scenario.toml", write_scenario_config(echo));

  json j = meta_json(ra.scenario, ra.cfg, ra.seed);
  j["n_paths"] = o.paths;
  j["t_end"] = o.t_end;
  j["dt_max"] = o.dt_max;
  j["transience_threshold"] = ra.summary.transience_threshold;
  j["transience_fraction"] = ra.summary.transience_fraction;
  j["floor_hit_fraction"] = ra.summary.floor_hit_fraction;
  j["exponent_fit"] = fit_json(ra.summary.exponent_fit);
  json incs = json::array();
  for (const auto& [T, v] : ra.summary.angle_increment_medians)
    incs.push_back(json::array({T, v}));
  j["angle_increment_medians"] = incs;
  json terms = json::array();
  for (double r : ra.summary.terminal_radius_samples) terms.push_back(num_or_null(r));
  j["terminal_radius_samples"] = terms;
  dump_json(o.out_dir + "/summary.json", j);

  out << "wrote " << o.out_dir << "/summary.json (scenario=" << ra.scenario.name
      << ", paths=" << o.paths << ", t_end=" << format_double(o.t_end)
      << ", seed=" << ra.seed << ")\n";
  return kExitOk;
}

int cmd_certify(const RunOptions& o, std::ostream& out) {
  const Scenario s = load_scenario(o);
  const std::uint64_t seed = resolve_seed(o, s);
  if (s.certificates.empty())
    throw std::invalid_argument("scenario '" + s.name + "' carries no certificates");
  ensure_directory(o.out_dir);
  const std::string cfg = canonical_config(s, o, seed);

  json arr = json::array();
  bool all_match = true;
  for (const ScenarioCertificate& want : s.certificates) {
    CertificateOptions copts;
    copts.seed = seed;
    const LyapunovCertificate c =
        check_certificate(s.system, want.candidate, want.r_lo, want.r_hi, copts);
    const bool match = (c.certified == want.expected_certified);
    all_match = all_match && match;

    json jc;
    jc["label"] = c.label;
    jc["requested_interval"] = json::array({num_or_null(c.requested_lo), num_or_null(c.requested_hi)});
    jc["checked_interval"] = json::array({c.checked_lo, c.checked_hi});
    jc["grid_points"] = c.grid_points;
    jc["angle_samples"] = c.angle_samples;
    jc["seed"] = c.seed;
    jc["worst_margin"] = num_or_null(c.worst_margin);
    jc["verdict"] = c.certified ? "certified" : "violated";
    jc["expected"] = want.expected_certified ? "certified" : "violated";
    jc["match"] = match;
    jc["total_violations"] = c.total_violations;
    json viols = json::array();
    for (const CertificateViolation& v : c.violations)
      viols.push_back({{"r", v.r}, {"angle_index", v.angle_index}, {"margin", num_or_null(v.margin)}});
    jc["violations"] = viols;
    arr.push_back(jc);

    out << "certificate " << c.label << " on [" << format_double(c.checked_lo) << ", "
        << format_double(c.checked_hi) << "]: " << (c.certified ? "certified" : "violated")
        << " (expected " << (want.expected_certified ? "certified" : "violated")
        << ", worst margin " << format_double(c.worst_margin) << ")\n";
  }

  json j = meta_json(s, cfg, seed);
  j["certificates"] = arr;
  j["all_match"] = all_match;
  dump_json(o.out_dir + "/certificates.json", j);
  out << (all_match ? "all certificate verdicts match expectations\n"
                    : "certificate verdict mismatch\n");
  return all_match ? kExitOk : kExitCertificate;
}

// Samples M(phi) at a deterministic spread of unit angles to decide whether
// the model's angular factor is constant (then prefactor and lower-bound
// checks are meaningful ensemble-wide).
bool constant_big_m(const PowerLawModel& model, int dim, double* value) {
  Vec e1 = Vec::Zero(dim);
  e1[0] = 1.0;
  const double m0 = model.big_m(e1);
  PathRng rng(9001, 0);
  double spread = 0.0;
  for (int k = 0; k < 8; ++k) {
    Vec phi(dim);
    for (int i = 0; i < dim; ++i) phi[i] = rng.normal(k, static_cast<std::uint32_t>(i));
    phi /= phi.norm();
    spread = std::max(spread, std::abs(model.big_m(phi) - m0));
  }
  *value = m0;
  return spread <= 1e-12 * std::max(1.0, std::abs(m0));
}

int cmd_analyze(const RunOptions& o, std::ostream& out) {
  RunArtifacts ra = run_ensemble(o);
  const Scenario& s = ra.scenario;
  ensure_directory(o.out_dir);

  json j = meta_json(s, ra.cfg, ra.seed);
  j["estimator"] = "per-path log-log least squares, ensemble median";
  const FitWindow w{o.t_end / 100.0, o.t_end};
  j["window"] = json::array({w.t_lo, w.t_hi});
  j["n_paths"] = o.paths;
  j["t_end"] = o.t_end;
  j["transience_fraction"] = ra.summary.transience_fraction;
  j["floor_hit_fraction"] = ra.summary.floor_hit_fraction;

  std::vector<std::string> failures;
  std::string verdict = "descriptive";

  PowerLawFit fit;
  bool fit_ok = false;
  try {
    fit = fit_power_law(ra.ens, w);
    fit_ok = true;
    json jf;
    jf["exponent"] = num_or_null(fit.exponent);
    jf["prefactor"] = num_or_null(fit.prefactor);
    jf["stderr"] = num_or_null(fit.stderr_);
    jf["exponent_iqr"] = num_or_null(fit.exponent_iqr);
    jf["paths_used"] = fit.paths_used;
    jf["paths_excluded"] = fit.paths_excluded;
    j["fit"] = jf;
  } catch (const std::exception& e) {
    failures.push_back(std::string("power-law fit failed: ") + e.what());
  }

  // Plot data: median radius per checkpoint over the fit window.
  {
    std::ostringstream csv;
    csv << "t,median_radius\n";
    const Trajectory& probe = ra.ens.paths.front();
    for (std::size_t i = 0; i < probe.times.size(); ++i) {
      const double t = probe.times[i];
      if (t < w.t_lo || t > w.t_hi) continue;
      std::vector<double> radii;
      for (const Trajectory& tr : ra.ens.paths)
        if (!tr.floor_hit_before(t)) radii.push_back(tr.radius(i));
      if (radii.empty()) continue;
      csv << format_double(t) << "," << format_double(median(radii)) << "\n";
    }
    write_text_file(o.out_dir + "/radius_median.csv", csv.str());
  }

  try {
    const AngleDiagnostics diag = angle_stabilization_diagnostics(ra.ens);
    json incs = json::array();
    std::ostringstream csv;
    csv << "T,median_angle_increment\n";
    for (const auto& [T, v] : diag.increments) {
      incs.push_back(json::array({T, v}));
      csv << format_double(T) << "," << format_double(v) << "\n";
    }
    j["angle_increments"] = incs;
    j["angle_paths_excluded"] = diag.paths_excluded;
    write_text_file(o.out_dir + "/angle_increments.csv", csv.str());
  } catch (const std::exception& e) {
    failures.push_back(std::string("angle diagnostics unavailable: ") + e.what());
  }

  // Deterministic-skeleton comparison on the first path.
  bool ratio_ok = true;
  try {
    const Trajectory ode = simulate_ode_skeleton(s.system, s.x0, ra.sched);
    const RadiusRatioReport ratio = sde_ode_equivalence(ra.ens.paths.front(), ode, w);
    std::ostringstream csv;
    csv << "t,radius_ratio\n";
    for (std::size_t i = 0; i < ratio.times.size(); ++i)
      csv << format_double(ratio.times[i]) << "," << format_double(ratio.ratios[i]) << "\n";
    write_text_file(o.out_dir + "/ratio.csv", csv.str());
    j["ode_ratio"] = {{"last_decade_median", num_or_null(ratio.last_decade_median)},
                      {"deviation", num_or_null(ratio.deviation)},
                      {"ode_hit_zero", ratio.ode_hit_zero}};
    if (ratio.ode_hit_zero) {
      ratio_ok = false;
      failures.push_back("deterministic skeleton reached zero; ratio diagnostic skipped");
    } else if (ratio.last_decade_median < 0.75 || ratio.last_decade_median > 1.25) {
      ratio_ok = false;
      failures.push_back("radius ratio to the deterministic skeleton is " +
                         format_double(ratio.last_decade_median) +
                         ", outside [0.75, 1.25]");
    }
  } catch (const std::exception& e) {
    ratio_ok = false;
    failures.push_back(std::string("skeleton comparison unavailable: ") + e.what());
  }

  if (s.angle_spec) {
    const AngleConditionReport rep = check_angle_conditions(*s.angle_spec);
    j["angle_conditions"] = {{"satisfied", rep.satisfied},
                             {"drift_margin", rep.drift_margin},
                             {"diffusion_margin", rep.diffusion_margin}};
  }

  if (s.polar_truth) {
    if (fit_ok) {
      const double alpha = s.polar_truth->alpha;
      const double gamma = 1.0 / (1.0 - alpha);
      json jp;
      jp["exponent"] = gamma;
      bool ok = std::abs(fit.exponent - gamma) <= 0.05 * gamma;
      if (!ok)
        failures.push_back("fitted exponent " + format_double(fit.exponent) +
                           " is not within 5% of predicted " + format_double(gamma));
      double m0 = 0.0;
      if (constant_big_m(*s.polar_truth, s.system.dim_state, &m0)) {
        const double pref = std::pow((1.0 - alpha) * m0, gamma);
        jp["prefactor"] = pref;
        if (std::abs(fit.prefactor - pref) > 0.20 * pref) {
          ok = false;
          failures.push_back("fitted prefactor " + format_double(fit.prefactor) +
                             " is not within 20% of predicted " + format_double(pref));
        }
        const LiminfReport lim = liminf_lower_bound_check(ra.ens, m0, alpha);
        j["liminf"] = {{"threshold", lim.threshold},
                       {"pass_fraction", lim.pass_fraction},
                       {"paths_excluded", lim.paths_excluded}};
        // The skeleton shares the radial law when the angular factor is
        // constant, so the ratio check is binding here.
        ok = ok && ratio_ok;
      }
      j["predicted"] = jp;
      verdict = ok ? "consistent" : "inconsistent";
    } else {
      verdict = "failed";
    }
  } else if (!fit_ok) {
    verdict = "failed";
  }

  if (s.radial_mu && s.radial_sigma) {
    const ScaleFunctionTable table =
        scale_function(s.radial_mu, s.radial_sigma, log_time_grid(1e-2, 1e3, 6));
    std::ostringstream csv;
    write_scale_csv(csv, table);
    write_text_file(o.out_dir + "/scale.csv", csv.str());
    const bool left_div = table.left == ScaleFunctionTable::Limit::divergent;
    const bool right_fin = table.right == ScaleFunctionTable::Limit::finite;
    json js;
    js["left"] = left_div ? "divergent" : "finite";
    js["right"] = right_fin ? "finite" : "divergent";
    js["right_estimate"] = num_or_null(table.right_estimate);
    if (s.scale_expectation) {
      const bool matches = (left_div == s.scale_expectation->left_divergent) &&
                           (right_fin == s.scale_expectation->right_finite);
      js["matches_expectation"] = matches;
      if (!matches) {
        failures.push_back("scale-function endpoint classification disagrees with the scenario");
        if (verdict == "consistent" || verdict == "descriptive") verdict = "inconsistent";
      }
    }
    j["scale"] = js;
  }

  j["verdict"] = verdict;
  j["failures"] = failures;
  dump_json(o.out_dir + "/analysis.json", j);

  out << "analysis verdict: " << verdict;
  if (fit_ok)
    out << " (exponent " << format_double(fit.exponent) << ", prefactor "
        << format_double(fit.prefactor) << ")";
  out << "\n";
  for (const std::string& f : failures) out << "  - " << f << "\n";
  return (verdict == "consistent" || verdict == "descriptive") ? kExitOk : kExitAnalysis;
}

std::string render_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return "n/a";
  return j[key].dump();
}

int cmd_report(const RunOptions& o, std::ostream& out) {
  if (!file_exists(o.out_dir))
    throw std::invalid_argument("output directory '" + o.out_dir + "' does not exist");

  std::ostringstream md;
  md << "# " << kToolName << " report\n";
  int sections = 0;

  const std::string summary_path = o.out_dir + "/summary.json";
  const std::string cert_path = o.out_dir + "/certificates.json";
  const std::string analysis_path = o.out_dir + "/analysis.json";

  auto parse = [](const std::string& path) {
    json j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded())
      throw std::invalid_argument("could not parse '" + path + "' as JSON");
    return j;
  };

  auto meta_lines = [&md](const json& j) {
    md << "- scenario: " << (j.contains("scenario") ? j["scenario"].get<std::string>() : "?")
       << "\n- seed: " << render_number(j, "seed") << "\n- config hash: "
       << (j.contains("config_hash") ? j["config_hash"].get<std::string>() : "?") << "\n";
  };

  if (file_exists(summary_path)) {
    ++sections;
    const json j = parse(summary_path);
    md << "\n## Simulation summary\n\n";
    meta_lines(j);
    md << "- paths: " << render_number(j, "n_paths") << ", horizon: " << render_number(j, "t_end")
       << "\n- transience fraction: " << render_number(j, "transience_fraction")
       << " (threshold " << render_number(j, "transience_threshold") << ")"
       << "\n- floor-hit fraction: " << render_number(j, "floor_hit_fraction") << "\n";
    if (j.contains("exponent_fit")) {
      const json& f = j["exponent_fit"];
      md << "- radius growth fit: slope " << render_number(f, "slope") << " +/- "
         << render_number(f, "stderr") << " (" << render_number(f, "paths_used")
         << " paths used, " << render_number(f, "paths_excluded") << " excluded)\n";
    }
    if (j.contains("angle_increment_medians") && !j["angle_increment_medians"].empty()) {
      md << "\n| horizon T | median angle increment |\n|---|---|\n";
      for (const auto& row : j["angle_increment_medians"])
        md << "| " << row[0].dump() << " | " << row[1].dump() << " |\n";
    }
  }

  if (file_exists(cert_path)) {
    ++sections;
    const json j = parse(cert_path);
    md << "\n## Certificates\n\n";
    meta_lines(j);
    md << "\n| candidate | interval | verdict | expected | worst margin |\n|---|---|---|---|---|\n";
    if (j.contains("certificates"))
      for (const auto& c : j["certificates"])
        md << "| " << (c.contains("label") ? c["label"].get<std::string>() : "?") << " | ["
           << (c.contains("checked_interval") ? c["checked_interval"][0].dump() : "?") << ", "
           << (c.contains("checked_interval") ? c["checked_interval"][1].dump() : "?") << "] | "
           << (c.contains("verdict") ? c["verdict"].get<std::string>() : "?") << " | "
           << (c.contains("expected") ? c["expected"].get<std::string>() : "?") << " | "
           << render_number(c, "worst_margin") << " |\n";
    md << "\nAll verdicts match expectations: "
       << (j.value("all_match", false) ? "yes" : "no") << "\n";
  }

  if (file_exists(analysis_path)) {
    ++sections;
    const json j = parse(analysis_path);
    md << "\n## Analysis\n\n";
    meta_lines(j);
    md << "- verdict: " << (j.contains("verdict") ? j["verdict"].get<std::string>() : "?") << "\n";
    if (j.contains("fit")) {
      const json& f = j["fit"];
      md << "- fitted exponent: " << render_number(f, "exponent") << " +/- "
         << render_number(f, "stderr") << ", prefactor: " << render_number(f, "prefactor") << "\n";
    }
    if (j.contains("predicted")) {
      const json& p = j["predicted"];
      md << "- predicted exponent: " << render_number(p, "exponent")
         << ", predicted prefactor: " << render_number(p, "prefactor") << "\n";
    }
    if (j.contains("liminf"))
      md << "- lower-bound pass fraction: " << render_number(j["liminf"], "pass_fraction")
         << " (threshold " << render_number(j["liminf"], "threshold") << ")\n";
    if (j.contains("scale"))
      md << "- scale function: left " << j["scale"].value("left", "?") << ", right "
         << j["scale"].value("right", "?") << "\n";
    if (j.contains("failures") && !j["failures"].empty()) {
      md << "\nFindings:\n";
      for (const auto& f : j["failures"]) md << "- " << f.get<std::string>() << "\n";
    }
  }

  if (sections == 0)
    throw std::invalid_argument("no artifacts to report in '" + o.out_dir + "'");
  write_text_file(o.out_dir + "/report.md", md.str());
  out << "wrote " << o.out_dir << "/report.md (" << sections << " sections)\n";
  return kExitOk;
}

void add_scenario_options(CLI::App* sub, RunOptions& o) {
  sub->add_option("--scenario", o.scenario,
                  "registry scenario name, e.g. power_drift:n=2,alpha=0.5");
  sub->add_option("--config", o.config_path, "scenario config file");
}

void add_seed_option(CLI::App* sub, RunOptions& o) {
  sub->add_option_function<std::uint64_t>(
      "--seed",
      [&o](const std::uint64_t& v) {
        o.seed = v;
        o.seed_set = true;
      },
      "base seed (default: SDELAB_SEED env, then the scenario default)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numerical laboratory for long-time behavior of stochastic systems"};
  app.require_subcommand(1);
  RunOptions o;

  CLI::App* sim = app.add_subcommand("simulate", "run an ensemble; write paths and summary.json");
  CLI::App* cert = app.add_subcommand("certify", "verify the scenario's radial certificates");
  CLI::App* ana = app.add_subcommand("analyze", "run an ensemble and compare with predictions");
  CLI::App* rep = app.add_subcommand("report", "collect artifacts in --out into report.md");
  CLI::App* lst = app.add_subcommand("list", "print the built-in scenario names");

  for (CLI::App* sub : {sim, ana}) {
    add_scenario_options(sub, o);
    add_seed_option(sub, o);
    sub->add_option("--out", o.out_dir, "output directory")->required();
    sub->add_option("--paths", o.paths, "number of paths")->check(CLI::Range(1, 1000000));
    sub->add_option("--t-end", o.t_end, "time horizon")->check(CLI::PositiveNumber);
    sub->add_option("--dt-max", o.dt_max, "maximum step size")->check(CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 256));
  }
  sim->add_option("--save-paths", o.save_paths, "number of per-path CSVs to write")
      ->check(CLI::Range(0, 1000000));
  add_scenario_options(cert, o);
  add_seed_option(cert, o);
  cert->add_option("--out", o.out_dir, "output directory")->required();
  rep->add_option("--out", o.out_dir, "directory holding the artifacts")->required();

  std::vector<const char*> argv;
  argv.push_back(kToolName);
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (cert->parsed()) return cmd_certify(o, out);
    if (ana->parsed()) return cmd_analyze(o, out);
    if (rep->parsed()) return cmd_report(o, out);
    if (lst->parsed()) {
      for (const std::string& name : registry_list()) out << name << "\n";
      return kExitOk;
    }
    err << "configuration error: no subcommand given\n";
    return kExitConfig;
  } catch (const SimulationError& e) {
    err << "simulation failure: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const MonotonicityError& e) {
    err << "certificate failure: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace sdelab
