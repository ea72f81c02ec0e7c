#include "sdelab/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sdelab {
namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Vec axis_start(int n, double r0) {
  Vec x0 = Vec::Zero(n);
  x0[0] = r0;
  return x0;
}

void require_dim(int n) {
  if (n < 2) throw std::invalid_argument("scenario dimension must be >= 2");
}

void require_alpha(double alpha) {
  if (!(alpha > -1.0 && alpha < 1.0))
    throw std::invalid_argument("drift exponent alpha must lie in (-1, 1)");
}

void require_r0(double r0) {
  if (!(r0 > 0.0) || !std::isfinite(r0))
    throw std::invalid_argument("start radius must be positive and finite");
}

// Radial closures shared by the power-drift family (tangential perturbations
// leave the radius dynamics untouched).
void attach_power_radials(Scenario& s, int n, double alpha) {
  s.radial_mu = [alpha, n](double r) {
    return std::pow(r, alpha) + (n - 1) / (2.0 * r);
  };
  s.radial_sigma = [](double) { return 1.0; };
  s.scale_expectation = ScaleExpectation{true, true};
}

int levenshtein(const std::string& a, const std::string& b) {
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  std::vector<int> prev(nb + 1), cur(nb + 1);
  for (int j = 0; j <= nb; ++j) prev[j] = j;
  for (int i = 1; i <= na; ++i) {
    cur[0] = i;
    for (int j = 1; j <= nb; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[nb];
}

std::string trim(const std::string& s) {
  size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

double parse_number(const std::string& tok, const std::string& what) {
  const std::string t = trim(tok);
  if (t.empty()) throw std::invalid_argument("empty number for " + what);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw std::invalid_argument("could not parse number '" + t + "' for " + what);
  if (!std::isfinite(v))
    throw std::invalid_argument("non-finite value for " + what);
  return v;
}

int as_int(double v, const std::string& what) {
  const int k = static_cast<int>(std::lround(v));
  if (std::abs(v - k) > 1e-9)
    throw std::invalid_argument(what + " must be an integer");
  return k;
}

double take(std::map<std::string, double>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end())
    throw std::invalid_argument("missing required parameter '" + key + "'");
  const double v = it->second;
  kv.erase(it);
  return v;
}

std::optional<double> take_opt(std::map<std::string, double>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) return std::nullopt;
  const double v = it->second;
  kv.erase(it);
  return v;
}

Scenario build_family(const std::string& family, std::map<std::string, double> kv) {
  Scenario s;
  if (family == "power_drift") {
    const int n = as_int(take(kv, "n"), "n");
    const double alpha = take(kv, "alpha");
    const double r0 = take_opt(kv, "r0").value_or(kDefaultStartRadius);
    if (!kv.empty())
      throw std::invalid_argument("unknown parameter '" + kv.begin()->first +
                                  "' for power_drift");
    s = build_power_drift(n, alpha, r0);
  } else if (family == "perturbed_drift") {
    const int n = as_int(take(kv, "n"), "n");
    const double alpha = take(kv, "alpha");
    const double eps = take(kv, "eps");
    const double c2 = take(kv, "c2");
    const double r0 = take_opt(kv, "r0").value_or(kDefaultStartRadius);
    if (!kv.empty())
      throw std::invalid_argument("unknown parameter '" + kv.begin()->first +
                                  "' for perturbed_drift");
    s = build_perturbed_drift(n, alpha, eps, c2, r0);
  } else if (family == "planar_sqrt") {
    const double r0 = take_opt(kv, "r0").value_or(kDefaultStartRadius);
    if (!kv.empty())
      throw std::invalid_argument("planar_sqrt takes no parameter '" +
                                  kv.begin()->first + "'");
    s = build_planar_sqrt(r0);
  } else if (family == "inward_drift") {
    const double r0 = take_opt(kv, "r0").value_or(kDefaultStartRadius);
    if (!kv.empty())
      throw std::invalid_argument("inward_drift takes no parameter '" +
                                  kv.begin()->first + "'");
    s = build_inward_drift(r0);
  } else {
    std::string best;
    int best_d = 1 << 20;
    for (const auto& cand : registry_list()) {
      const int d = levenshtein(family, cand.substr(0, cand.find(':')));
      if (d < best_d) { best_d = d; best = cand; }
    }
    throw std::invalid_argument("unknown scenario family '" + family +
                                "'; nearest registry entry is '" + best + "'");
  }
  return s;
}

}  // namespace

Scenario build_power_drift(int n, double alpha, double r0) {
  require_dim(n);
  require_alpha(alpha);
  require_r0(r0);
  Scenario s;
  s.family = "power_drift";
  s.name = "power_drift:n=" + std::to_string(n) + ",alpha=" + fmt_g(alpha);
  s.system.dim_state = n;
  s.system.dim_noise = n;
  s.system.label = s.name;
  s.system.drift = [alpha](const Vec& x) -> Vec {
    const double r = x.norm();
    return std::pow(r, alpha - 1.0) * x;
  };
  s.system.diffusion = [n](const Vec&) -> Mat { return Mat::Identity(n, n); };
  s.x0 = axis_start(n, r0);

  PowerLawModel truth;
  truth.alpha = alpha;
  truth.big_m = [](const Vec&) { return 1.0; };
  truth.label = s.name;
  s.polar_truth = truth;

  AngleStabilizationSpec spec;
  spec.gamma = 1.0 / (1.0 - alpha);
  spec.delta1 = 2.0;
  spec.delta2 = 1.0;
  spec.nu_star = 0.5 * (n - 1);
  spec.chi_star = std::sqrt(static_cast<double>(n - 1));
  s.angle_spec = spec;

  attach_power_radials(s, n, alpha);

  ScenarioCertificate outer;
  outer.candidate = candidate_inverse_r();
  outer.r_lo = 10.0;
  outer.r_hi = std::numeric_limits<double>::infinity();
  outer.expected_certified = true;
  s.certificates.push_back(outer);

  s.params = {{"n", static_cast<double>(n)}, {"alpha", alpha}, {"r0", r0}};
  s.notes = "unit-strength radial power drift with identity noise";
  return s;
}

Scenario build_perturbed_drift(int n, double alpha, double eps, double c2, double r0) {
  require_dim(n);
  require_alpha(alpha);
  require_r0(r0);
  if (!(eps > 0.0)) throw std::invalid_argument("perturbation decay eps must be > 0");
  if (!(c2 >= 0.0)) throw std::invalid_argument("perturbation strength c2 must be >= 0");
  Scenario s;
  s.family = "perturbed_drift";
  s.name = "perturbed_drift:n=" + std::to_string(n) + ",alpha=" + fmt_g(alpha) +
           ",eps=" + fmt_g(eps) + ",c2=" + fmt_g(c2);
  s.system.dim_state = n;
  s.system.dim_noise = n;
  s.system.label = s.name;
  s.system.drift = [n, alpha, eps, c2](const Vec& x) -> Vec {
    const double r = x.norm();
    Vec a = std::pow(r, alpha - 1.0) * x;
    if (c2 == 0.0 || r == 0.0) return a;
    Vec tau;
    if (n == 2) {
      tau = Vec(2);
      tau << -x[1] / r, x[0] / r;
    } else {
      // Tangential projection of the last axis, smoothly regularized so the
      // field vanishes where the projection degenerates.
      Vec u = Vec::Zero(n);
      u[n - 1] = 1.0;
      u -= (x[n - 1] / (r * r)) * x;
      tau = u / std::sqrt(u.squaredNorm() + 0.01);
    }
    a += c2 * std::pow(r, alpha - eps) * tau;
    return a;
  };
  s.system.diffusion = [n](const Vec&) -> Mat { return Mat::Identity(n, n); };
  s.x0 = axis_start(n, r0);

  PowerLawModel truth;
  truth.alpha = alpha;
  truth.big_m = [](const Vec&) { return 1.0; };
  truth.label = s.name;
  s.polar_truth = truth;

  AngleStabilizationSpec spec;
  spec.gamma = 1.0 / (1.0 - alpha);
  spec.delta1 = std::min(1.0 - alpha + eps, 2.0);
  spec.delta2 = 1.0;
  spec.nu_star = c2 + 0.5 * (n - 1);
  spec.chi_star = std::sqrt(static_cast<double>(n - 1));
  s.angle_spec = spec;

  attach_power_radials(s, n, alpha);

  ScenarioCertificate inner;
  inner.candidate = candidate_neg_inverse_power(n);
  inner.r_lo = 0.0;
  inner.r_hi = 0.1;
  // L[-r^{-(n-1)}] = (n-1) r^{-n} (r^alpha - 1/(2r)): non-positive on (0, 0.1]
  // exactly when 0.1^{alpha+1} <= 1/2.
  inner.expected_certified = std::pow(0.1, alpha + 1.0) <= 0.5 + 1e-12;
  s.certificates.push_back(inner);

  ScenarioCertificate outer;
  outer.candidate = candidate_inverse_r();
  outer.r_lo = 10.0;
  outer.r_hi = std::numeric_limits<double>::infinity();
  outer.expected_certified = true;
  s.certificates.push_back(outer);

  s.params = {{"n", static_cast<double>(n)},
              {"alpha", alpha},
              {"eps", eps},
              {"c2", c2},
              {"r0", r0}};
  s.notes = "power drift plus decaying tangential perturbation";
  return s;
}

Scenario build_planar_sqrt(double r0) {
  require_r0(r0);
  Scenario s;
  s.family = "planar_sqrt";
  s.name = "planar_sqrt";
  s.system.dim_state = 2;
  s.system.dim_noise = 2;
  s.system.label = s.name;
  s.system.drift = [](const Vec& x) -> Vec {
    Vec a(2);
    for (int i = 0; i < 2; ++i) {
      const double sgn = (x[i] > 0.0) - (x[i] < 0.0);
      a[i] = sgn * std::sqrt(std::abs(x[i]));
    }
    return a;
  };
  s.system.diffusion = [](const Vec&) -> Mat { return Mat::Identity(2, 2); };
  s.x0 = axis_start(2, r0);

  PowerLawModel truth;
  truth.alpha = 0.5;
  truth.big_m = [](const Vec& phi) {
    return std::pow(std::abs(phi[0]), 1.5) + std::pow(std::abs(phi[1]), 1.5);
  };
  truth.label = s.name;
  s.polar_truth = truth;

  ScenarioCertificate inner;
  inner.candidate = candidate_log_r();
  inner.r_lo = 0.0;
  inner.r_hi = 0.1;
  inner.expected_certified = true;
  s.certificates.push_back(inner);

  ScenarioCertificate outer;
  outer.candidate = candidate_inverse_r();
  outer.r_lo = 10.0;
  outer.r_hi = 1e4;
  outer.expected_certified = true;
  s.certificates.push_back(outer);

  s.params = {{"r0", r0}};
  s.notes = "componentwise signed square-root drift in the plane";
  return s;
}

Scenario build_inward_drift(double r0) {
  require_r0(r0);
  Scenario s;
  s.family = "inward_drift";
  s.name = "inward_drift";
  s.system.dim_state = 2;
  s.system.dim_noise = 2;
  s.system.label = s.name;
  s.system.drift = [](const Vec& x) -> Vec {
    const double r = x.norm();
    if (r == 0.0) return Vec::Zero(2);
    return Vec(-x / r);
  };
  s.system.diffusion = [](const Vec&) -> Mat { return Mat::Identity(2, 2); };
  s.x0 = axis_start(2, r0);

  s.radial_mu = [](double r) { return -1.0 + 1.0 / (2.0 * r); };
  s.radial_sigma = [](double) { return 1.0; };
  s.scale_expectation = ScaleExpectation{true, false};

  // Negative control: the outward-escape certificate is claimed but does not
  // hold (the margin is strictly positive), so verification must flag it.
  ScenarioCertificate outer;
  outer.candidate = candidate_inverse_r();
  outer.r_lo = 10.0;
  outer.r_hi = 100.0;
  outer.expected_certified = true;
  s.certificates.push_back(outer);

  s.params = {{"r0", r0}};
  s.notes = "unit inward drift; certificate claim is deliberately false";
  return s;
}

std::vector<std::string> registry_list() {
  return {
      "inward_drift",
      "perturbed_drift:n=3,alpha=0,eps=0.5,c2=0.1",
      "planar_sqrt",
      "power_drift:n=2,alpha=-0.5",
      "power_drift:n=2,alpha=0.5",
      "power_drift:n=3,alpha=0",
  };
}

Scenario registry_lookup(const std::string& name) {
  const size_t colon = name.find(':');
  const std::string family = trim(name.substr(0, colon));
  std::map<std::string, double> kv;
  if (colon != std::string::npos) {
    std::stringstream ss(name.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const size_t eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("malformed parameter '" + item +
                                    "' (expected key=value)");
      const std::string key = trim(item.substr(0, eq));
      if (key.empty()) throw std::invalid_argument("empty parameter name");
      if (kv.count(key)) throw std::invalid_argument("duplicate parameter '" + key + "'");
      kv[key] = parse_number(item.substr(eq + 1), "parameter '" + key + "'");
    }
  }
  return build_family(family, std::move(kv));
}

std::string write_scenario_config(const Scenario& s) {
  std::ostringstream out;
  out << "# scenario configuration\n";
  out << "name = \"" << s.family << "\"\n";
  out << "n = " << s.system.dim_state << "\n";
  out << "m = " << s.system.dim_noise << "\n";
  for (const auto& [key, value] : s.params) {
    if (key == "r0" || key == "n") continue;  // carried by x0 / the n field
    out << key << " = " << fmt_g17(value) << "\n";
  }
  out << "x0 = [";
  for (int i = 0; i < s.x0.size(); ++i) {
    if (i) out << ", ";
    out << fmt_g17(s.x0[i]);
  }
  out << "]\n";
  out << "seed = " << s.default_seed << "\n";
  return out.str();
}

Scenario read_scenario_config(const std::string& text) {
  std::map<std::string, double> numbers;
  std::optional<std::string> family;
  std::optional<std::vector<double>> x0;
  std::optional<std::uint64_t> seed;

  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    // Strip comments outside quotes.
    std::string line;
    bool in_quote = false;
    for (char c : raw) {
      if (c == '"') in_quote = !in_quote;
      if (c == '#' && !in_quote) break;
      line += c;
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = " (config line " + std::to_string(line_no) + ")";
    if (line[0] == '[')
      throw std::invalid_argument("config sections are not supported" + where);
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key = value" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw std::invalid_argument("expected key = value" + where);
    for (char c : key)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        throw std::invalid_argument("invalid key '" + key + "'" + where);

    if (key == "name") {
      if (family) throw std::invalid_argument("duplicate key 'name'" + where);
      if (val.size() < 2 || val.front() != '"' || val.back() != '"')
        throw std::invalid_argument("name must be a quoted string" + where);
      family = val.substr(1, val.size() - 2);
    } else if (key == "x0") {
      if (x0) throw std::invalid_argument("duplicate key 'x0'" + where);
      if (val.size() < 2 || val.front() != '[' || val.back() != ']')
        throw std::invalid_argument("x0 must be a number array" + where);
      std::vector<double> entries;
      std::stringstream items(val.substr(1, val.size() - 2));
      std::string item;
      while (std::getline(items, item, ','))
        entries.push_back(parse_number(item, "x0 entry"));
      if (entries.empty())
        throw std::invalid_argument("x0 must not be empty" + where);
      x0 = std::move(entries);
    } else if (key == "seed") {
      if (seed) throw std::invalid_argument("duplicate key 'seed'" + where);
      const double v = parse_number(val, "seed");
      if (v < 0 || std::abs(v - std::floor(v)) > 0)
        throw std::invalid_argument("seed must be a non-negative integer" + where);
      seed = static_cast<std::uint64_t>(v);
    } else {
      if (numbers.count(key))
        throw std::invalid_argument("duplicate key '" + key + "'" + where);
      numbers[key] = parse_number(val, "key '" + key + "'");
    }
  }

  if (!family) throw std::invalid_argument("config is missing 'name'");
  // n is a builder parameter for the parametric families and a consistency
  // check for the fixed-dimension ones; m must match (all built-ins drive
  // every coordinate with its own noise channel).
  std::optional<int> m_given;
  if (auto m = take_opt(numbers, "m")) m_given = as_int(*m, "m");
  if (*family == "planar_sqrt" || *family == "inward_drift") {
    if (auto n = take_opt(numbers, "n")) {
      if (as_int(*n, "n") != 2)
        throw std::invalid_argument("scenario '" + *family + "' is two-dimensional");
    }
  }
  Scenario s = build_family(*family, std::move(numbers));
  if (m_given && *m_given != s.system.dim_noise)
    throw std::invalid_argument("m = " + std::to_string(*m_given) +
                                " is unsupported here (noise dimension is fixed to " +
                                std::to_string(s.system.dim_noise) + ")");
  if (seed) s.default_seed = *seed;
  if (x0) {
    if (static_cast<int>(x0->size()) != s.system.dim_state)
      throw std::invalid_argument("x0 has " + std::to_string(x0->size()) +
                                  " entries but the scenario has dimension " +
                                  std::to_string(s.system.dim_state));
    Vec v(static_cast<int>(x0->size()));
    for (size_t i = 0; i < x0->size(); ++i) v[static_cast<int>(i)] = (*x0)[i];
    if (!(v.norm() > 0.0))
      throw std::invalid_argument("x0 must not be the origin");
    s.x0 = v;
    s.params["r0"] = v.norm();
  }
  return s;
}

Ensemble run_scenario_ensemble(const Scenario& s, int n_paths, const StepSchedule& sched,
                               std::uint64_t base_seed, const EnsembleOptions& opts) {
  return simulate_ensemble(s.system, s.x0, n_paths, sched, base_seed, opts);
}

}  // namespace sdelab
