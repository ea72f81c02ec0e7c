#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdelab/integrator.hpp"
#include "sdelab/types.hpp"

namespace sdelab {

// Predicted long-time radius R(t) ~ ((1-alpha) M(phi) t)^{1/(1-alpha)} for a
// drift whose radial component behaves like M(phi) r^alpha at infinity.
struct PowerLawModel {
  double alpha = 0.0;  // must lie in (-1, 1)
  std::function<double(const Vec&)> big_m;  // M(phi) > 0
  std::string label;
};

double predicted_radius(const PowerLawModel& model, const Vec& phi, double t);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;  // exp(intercept)
  double stderr_ = 0.0;
  double exponent_iqr = 0.0;  // 0 for single-trajectory fits
  int paths_used = 0;
  int paths_excluded = 0;
};

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

// Log-log least squares of radius against time over the window (>= 8
// checkpoints required).  The single-trajectory form refuses windows that
// contain a floor event; the ensemble form excludes floor-hit paths and
// reports medians and IQR across per-path fits.
PowerLawFit fit_power_law(const Trajectory& traj, const FitWindow& window);
PowerLawFit fit_power_law(const Ensemble& ens, const FitWindow& window);

// Sufficient conditions for angle stabilization, given the polar envelope
// exponents: |nu| <~ 1/r^{delta1}, |chi| <~ 1/r^{delta2} along R(t) ~ t^gamma.
struct AngleStabilizationSpec {
  double gamma = 0.0;   // radius growth exponent
  double delta1 = 0.0;  // angle drift decay exponent
  double delta2 = 0.0;  // angle diffusion decay exponent
  double nu_star = 0.0;   // envelope constant for |nu|
  double chi_star = 0.0;  // envelope constant for |chi|
};

struct AngleConditionReport {
  bool satisfied = false;
  double drift_margin = 0.0;      // delta1 - 1/gamma (must be > 0)
  double diffusion_margin = 0.0;  // delta2 - 1/(2 gamma) (must be > 0)
};

AngleConditionReport check_angle_conditions(const AngleStabilizationSpec& spec);

struct AngleDiagnostics {
  // (T, median |Phi(T) - Phi(T/2)|) ascending in T; floor-hit paths excluded.
  std::vector<std::pair<double, double>> increments;
  int paths_excluded = 0;
};

// Requires both T and T/2 to be checkpoint times for at least 3 dyadic T.
AngleDiagnostics angle_stabilization_diagnostics(const Ensemble& ens);

// Almost-sure decay harness for M(t) = int_0^t b(s) dB(s) with deterministic
// b: per-path sup_{[t_hi/10, t_hi]} |M(t)| / t^gamma and ensemble percentiles,
// plus the same statistic one decade earlier for the decay contrast.
struct ItoDecayReport {
  double gamma = 0.0;
  double beta = 0.0;  // growth exponent of b, for the record
  std::vector<double> sup_last_decade;  // per path
  std::vector<double> sup_prev_decade;
  double p95_last = 0.0;
  double p95_prev = 0.0;
};

ItoDecayReport ito_integral_decay(const std::function<double(double)>& b, double beta,
                                  double gamma, int n_paths,
                                  const std::vector<double>& t_grid, std::uint64_t seed);

// Log-spaced grid helper (points_per_decade >= 4).
std::vector<double> log_time_grid(double t_lo, double t_hi, int points_per_decade);

// Checkpointwise radius ratio R_sde / |x_ode| with last-decade summary.
struct RadiusRatioReport {
  std::vector<double> times;
  std::vector<double> ratios;
  double last_decade_median = 0.0;
  double deviation = 0.0;  // |median - 1|
  bool ode_hit_zero = false;
};

RadiusRatioReport sde_ode_equivalence(const Trajectory& sde, const Trajectory& ode,
                                      const FitWindow& window);

// Fraction of paths whose min over the last decade of R(t)/t^{1/(1-alpha)}
// clears 0.8 * ((1-alpha) a2)^{1/(1-alpha)}.
struct LiminfReport {
  double threshold = 0.0;
  double pass_fraction = 0.0;
  int paths_excluded = 0;
};

LiminfReport liminf_lower_bound_check(const Ensemble& ens, double a2, double alpha);

}  // namespace sdelab
