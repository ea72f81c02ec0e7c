#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "sdelab/types.hpp"

namespace sdelab {

enum class Monotonicity { non_decreasing, decreasing };

// Radial test function V(r) with user-supplied derivatives.  The derivatives
// are cross-checked against finite differences of `value` on the certificate
// grid, so the three callables must describe the same function.
struct LyapunovCandidate {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  Monotonicity claim = Monotonicity::non_decreasing;
  std::string label;
};

// Stock candidates used by the bundled scenarios.
LyapunovCandidate candidate_log_r();                     // ln r, non-decreasing
LyapunovCandidate candidate_inverse_r();                 // 1/r, decreasing
LyapunovCandidate candidate_neg_inverse_power(int n);    // -r^{-(n-1)}, non-decreasing

// One-dimensional generator applied to V at radius r:
//   L[V](r) = mu V'(r) + (sigma^2 / 2) V''(r).
double apply_generator(double mu, double sigma, const LyapunovCandidate& V, double r);

struct MonotonicityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CertificateViolation {
  double r = 0.0;
  int angle_index = -1;
  double margin = 0.0;
};

struct LyapunovCertificate {
  std::string label;
  double requested_lo = 0.0, requested_hi = 0.0;  // interval as asked for
  double checked_lo = 0.0, checked_hi = 0.0;      // after truncation
  int grid_points = 0;
  int angle_samples = 0;
  std::uint64_t seed = 0;
  double worst_margin = 0.0;  // max over grid x angles of L[V]
  bool certified = false;     // worst_margin <= +1e-10
  long long total_violations = 0;
  std::vector<CertificateViolation> violations;  // at most kMaxStoredViolations
};

inline constexpr double kCertMarginTol = 1e-10;
inline constexpr int kMaxStoredViolations = 100;

struct CertificateOptions {
  int grid_per_decade = 64;   // log-spaced radial nodes per decade
  int angle_samples = 256;    // seeded uniform draws on the unit sphere
  std::uint64_t seed = 1;
};

// Evaluates L[V] over a log-spaced radial grid times random unit angles.
// Certified iff every margin is <= +1e-10.  Interval endpoints may be 0
// (truncated to 1e-6) or +infinity (truncated to 1e4 * lower endpoint).
LyapunovCertificate check_certificate(const SdeSystem& sys, const LyapunovCandidate& V,
                                      double r_lo, double r_hi,
                                      const CertificateOptions& opts = {});

struct ScaleFunctionTable {
  enum class Limit { finite, divergent };
  std::vector<double> nodes;   // sorted ascending
  std::vector<double> values;  // s(node), with s(1) = 0
  Limit left = Limit::finite;       // behavior of s(r) as r -> 0+
  double left_log_slope = 0.0;      // ~0 log divergence, <0 power divergence, >0 finite
  Limit right = Limit::finite;      // behavior as r -> +infinity (tail comparison)
  double right_estimate = 0.0;      // extrapolated s(+inf) when finite
};

// Scale function s(r) = int_1^r exp(-int_1^u 2 mu(v)/sigma^2(v) dv) du via
// nested adaptive quadrature (panel tolerance `panel_tol`).  Left-endpoint
// behavior is probed at epsilon in {1e-2, 1e-4, 1e-6}.
ScaleFunctionTable scale_function(const std::function<double(double)>& mu,
                                  const std::function<double(double)>& sigma,
                                  std::vector<double> nodes, double panel_tol = 1e-10);

// CSV schema "r,s" with 17 significant digits.
void write_scale_csv(std::ostream& os, const ScaleFunctionTable& table);

struct ExitProbabilityBounds {
  double left_upper = 0.0;   // P(exit at x1) <= (V(x0)-V(x2)) / (V(x1)-V(x2))
  double right_lower = 0.0;  // P(exit at x2) >= (V(x1)-V(x0)) / (V(x1)-V(x2))
};

// Bounds from a decreasing V with L[V] <= 0 on [x1, x2], started at x0.
ExitProbabilityBounds exit_probability_bounds(const std::function<double(double)>& V,
                                              double x0, double x1, double x2);

// Bound E[exit time] <= 2 max_{[x1,x2]} |u| for u solving L[u] = -1 style
// comparison problems; the max is taken on a dense grid (log-spaced when the
// interval is strictly positive).
double exit_time_bound(const std::function<double(double)>& u, double x1, double x2);

// Integral-inequality growth bound: if u(t) <= a(t) + C int_0^t u^beta(s) ds
// with C > 0, beta in (0,1), a >= 0 non-decreasing, then
//   u(t) <= ( a(t)^{1-beta} + C (1-beta) t )^{1/(1-beta)},
// with equality when u solves the equation with constant a.
struct GronwallInstance {
  double constant = 1.0;  // C
  double beta = 0.5;
  std::function<double(double)> forcing;  // a(t)
};

struct GronwallPoint {
  double t = 0.0;
  double bound = 0.0;
  double observed = 0.0;
  bool holds = false;  // observed <= bound * (1 + 1e-9)
};

std::vector<GronwallPoint> gronwall_bound(const GronwallInstance& inst,
                                          const std::function<double(double)>& u,
                                          const std::vector<double>& t_grid);

}  // namespace sdelab
