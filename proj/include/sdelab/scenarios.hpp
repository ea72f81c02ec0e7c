#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdelab/asymptotics.hpp"
#include "sdelab/integrator.hpp"
#include "sdelab/lyapunov.hpp"
#include "sdelab/types.hpp"

namespace sdelab {

struct ScenarioCertificate {
  LyapunovCandidate candidate;
  double r_lo = 0.0;
  double r_hi = 0.0;  // +infinity allowed (truncated by check_certificate)
  bool expected_certified = true;
};

struct ScaleExpectation {
  bool left_divergent = true;
  bool right_finite = true;
};

// A fully wired experiment: the SDE, its analytic reference data, and the
// certificates it is expected to carry.
struct Scenario {
  std::string family;
  std::string name;  // canonical parameterized name, e.g. "power_drift:n=2,alpha=0.5"
  SdeSystem system;
  Vec x0;
  std::uint64_t default_seed = 1;
  std::optional<PowerLawModel> polar_truth;
  std::optional<AngleStabilizationSpec> angle_spec;
  std::vector<ScenarioCertificate> certificates;
  std::optional<ScaleExpectation> scale_expectation;
  // Radial closures for the scale-function tool; only set when the radius
  // dynamics do not depend on the angle.
  std::function<double(double)> radial_mu;
  std::function<double(double)> radial_sigma;
  std::map<std::string, double> params;
  std::string notes;
};

inline constexpr double kDefaultStartRadius = 5.0;

// dX = |X|^{alpha-1} X dt + dW: radial power drift of unit strength.
Scenario build_power_drift(int n, double alpha, double r0 = kDefaultStartRadius);

// Power drift plus a tangential perturbation c2 |x|^{alpha-eps} tau(x); for
// n = 2 tau is the 90-degree rotation of x/|x|, for n >= 3 a regularized
// projection of the last coordinate axis onto the tangent space.
Scenario build_perturbed_drift(int n, double alpha, double eps, double c2,
                               double r0 = kDefaultStartRadius);

// dX_i = sgn(X_i) sqrt(|X_i|) dt + dW_i in the plane.
Scenario build_planar_sqrt(double r0 = kDefaultStartRadius);

// Unit inward drift: the negative control whose attached certificate is
// deliberately expected-certified but computes as violated.
Scenario build_inward_drift(double r0 = kDefaultStartRadius);

// Exact-name lookup over the built-ins; parameterized names of the known
// families ("power_drift:n=2,alpha=0.5") are built on the fly.  Unknown
// names raise std::invalid_argument carrying the nearest registry entry.
Scenario registry_lookup(const std::string& name);
std::vector<std::string> registry_list();

// Plain-text scenario config (TOML subset: "key = value" lines, strings,
// numbers, flat number arrays, # comments).
std::string write_scenario_config(const Scenario& s);
Scenario read_scenario_config(const std::string& text);

// Ensemble convenience wrapper seeded from the scenario defaults.
Ensemble run_scenario_ensemble(const Scenario& s, int n_paths, const StepSchedule& sched,
                               std::uint64_t base_seed, const EnsembleOptions& opts = {});

}  // namespace sdelab
