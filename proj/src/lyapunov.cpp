#include "sdelab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>

#include "sdelab/polar.hpp"
#include "sdelab/quadrature.hpp"
#include "sdelab/rng.hpp"

namespace sdelab {

LyapunovCandidate candidate_log_r() {
  LyapunovCandidate c;
  c.value = [](double r) { return std::log(r); };
  c.d1 = [](double r) { return 1.0 / r; };
  c.d2 = [](double r) { return -1.0 / (r * r); };
  c.claim = Monotonicity::non_decreasing;
  c.label = "log_r";
  return c;
}

LyapunovCandidate candidate_inverse_r() {
  LyapunovCandidate c;
  c.value = [](double r) { return 1.0 / r; };
  c.d1 = [](double r) { return -1.0 / (r * r); };
  c.d2 = [](double r) { return 2.0 / (r * r * r); };
  c.claim = Monotonicity::decreasing;
  c.label = "inverse_r";
  return c;
}

LyapunovCandidate candidate_neg_inverse_power(int n) {
  if (n < 2) throw std::invalid_argument("candidate_neg_inverse_power: n >= 2 required");
  const double p = n - 1;
  LyapunovCandidate c;
  c.value = [p](double r) { return -std::pow(r, -p); };
  c.d1 = [p](double r) { return p * std::pow(r, -p - 1.0); };
  c.d2 = [p](double r) { return -p * (p + 1.0) * std::pow(r, -p - 2.0); };
  c.claim = Monotonicity::non_decreasing;
  c.label = "neg_r_pow_" + std::to_string(n - 1);
  return c;
}

double apply_generator(double mu, double sigma, const LyapunovCandidate& V, double r) {
  return mu * V.d1(r) + 0.5 * sigma * sigma * V.d2(r);
}

namespace {

// Candidate self-consistency: the supplied derivatives must match central
// finite differences of `value` to 1e-4 relative on sampled grid nodes.
void validate_candidate(const LyapunovCandidate& V, const std::vector<double>& grid) {
  if (!V.value || !V.d1 || !V.d2) {
    throw std::invalid_argument("candidate '" + V.label + "' is missing callables");
  }
  for (std::size_t i = 0; i < grid.size(); i += 5) {
    const double r = grid[i];
    const double h = 1e-4 * r;
    const double vp = V.value(r + h), vm = V.value(r - h), v0 = V.value(r);
    const double fd1 = (vp - vm) / (2.0 * h);
    const double fd2 = (vp - 2.0 * v0 + vm) / (h * h);
    if (std::fabs(fd1 - V.d1(r)) > 1e-4 * (std::fabs(fd1) + 1e-12) ||
        std::fabs(fd2 - V.d2(r)) > 1e-4 * (std::fabs(fd2) + 1e-12)) {
      throw std::invalid_argument("candidate '" + V.label +
                                  "' derivatives inconsistent with its value near r = " +
                                  std::to_string(r));
    }
  }
}

void check_monotonicity(const LyapunovCandidate& V, const std::vector<double>& grid) {
  for (double r : grid) {
    const double d = V.d1(r);
    if (V.claim == Monotonicity::non_decreasing && d < -1e-10) {
      throw MonotonicityError("candidate '" + V.label +
                              "' claims non-decreasing but V' < 0 at r = " +
                              std::to_string(r));
    }
    if (V.claim == Monotonicity::decreasing && d > 1e-10) {
      throw MonotonicityError("candidate '" + V.label +
                              "' claims decreasing but V' > 0 at r = " + std::to_string(r));
    }
  }
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const double decades = std::log10(hi / lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * per_decade)) + 1);
  std::vector<double> g(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) g[i] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

Vec random_unit_vector(const PathRng& rng, std::uint64_t index, int n) {
  Vec v(n);
  for (int k = 0; k < n; ++k) v[k] = rng.normal(index, static_cast<std::uint32_t>(k));
  const double norm = v.norm();
  if (!(norm > 1e-12)) {
    // Essentially impossible; fall back to a coordinate direction.
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

}  // namespace

LyapunovCertificate check_certificate(const SdeSystem& sys, const LyapunovCandidate& V,
                                      double r_lo, double r_hi,
                                      const CertificateOptions& opts) {
  validate_system(sys);
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) {
    throw std::invalid_argument("check_certificate: need 0 <= r_lo < r_hi");
  }
  LyapunovCertificate cert;
  cert.label = V.label;
  cert.requested_lo = r_lo;
  cert.requested_hi = r_hi;
  // Truncation: open-at-zero intervals start at 1e-6; unbounded intervals
  // stop at 1e4 times the lower endpoint.
  cert.checked_lo = std::max(r_lo, 1e-6);
  cert.checked_hi = std::isinf(r_hi) ? 1e4 * cert.checked_lo : r_hi;
  if (!(cert.checked_lo < cert.checked_hi)) {
    throw std::invalid_argument("check_certificate: empty interval after truncation");
  }
  cert.angle_samples = opts.angle_samples;
  cert.seed = opts.seed;

  const std::vector<double> grid =
      log_grid(cert.checked_lo, cert.checked_hi, opts.grid_per_decade);
  cert.grid_points = static_cast<int>(grid.size());
  validate_candidate(V, grid);
  check_monotonicity(V, grid);

  PathRng rng(opts.seed, 0);
  std::vector<Vec> angles;
  angles.reserve(opts.angle_samples);
  for (int j = 0; j < opts.angle_samples; ++j) {
    angles.push_back(random_unit_vector(rng, static_cast<std::uint64_t>(j), sys.dim_state));
  }

  cert.worst_margin = -std::numeric_limits<double>::infinity();
  for (double r : grid) {
    for (int j = 0; j < opts.angle_samples; ++j) {
      const PolarCoefficients pc = polar_coefficients(sys, r, angles[j]);
      const double margin = apply_generator(pc.mu, pc.sigma, V, r);
      if (!std::isfinite(margin)) {
        throw std::domain_error("check_certificate: non-finite margin at r = " +
                                std::to_string(r));
      }
      cert.worst_margin = std::max(cert.worst_margin, margin);
      if (margin > kCertMarginTol) {
        ++cert.total_violations;
        if (cert.violations.size() < kMaxStoredViolations) {
          cert.violations.push_back({r, j, margin});
        }
      }
    }
  }
  cert.certified = cert.worst_margin <= kCertMarginTol;
  return cert;
}

ScaleFunctionTable scale_function(const std::function<double(double)>& mu,
                                  const std::function<double(double)>& sigma,
                                  std::vector<double> nodes, double panel_tol) {
  if (nodes.empty()) throw std::invalid_argument("scale_function: no nodes");
  std::sort(nodes.begin(), nodes.end());
  if (!(nodes.front() > 0.0)) {
    throw std::invalid_argument("scale_function: nodes must be positive");
  }
  for (double r : std::vector<double>{nodes.front(), 1.0, nodes.back()}) {
    if (!(sigma(r) > 0.0)) {
      throw std::invalid_argument("scale_function: sigma must be positive");
    }
  }

  // Inner antiderivative I(u) = int_1^u 2 mu / sigma^2, cached so the outer
  // quadrature's scattered evaluation points stay cheap.
  auto inner = std::make_shared<CumulativeIntegral>(
      [mu, sigma](double v) {
        const double s = sigma(v);
        return 2.0 * mu(v) / (s * s);
      },
      1.0, panel_tol);
  CumulativeIntegral outer([inner](double u) { return std::exp(-(*inner)(u)); }, 1.0,
                           panel_tol);

  // A steeply divergent scale function (strongly inward drift, say) overflows
  // the outward integral; the saturated value is itself the classification,
  // so absorb the quadrature's non-finite signal instead of failing.
  auto eval = [&outer](double r) -> double {
    try {
      return outer(r);
    } catch (const std::domain_error&) {
      return r >= 1.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
    }
  };

  ScaleFunctionTable table;
  table.nodes = nodes;
  table.values.reserve(nodes.size());
  // Evaluate outward from the anchor r = 1 so cached spans stay short.
  std::vector<double> above, below;
  for (double r : nodes) (r >= 1.0 ? above : below).push_back(r);
  std::sort(below.rbegin(), below.rend());
  for (double r : below) eval(r);
  for (double r : above) eval(r);
  for (double r : nodes) table.values.push_back(eval(r));

  // Left endpoint: compare s(eps) decrements across eps = 1e-2, 1e-4, 1e-6.
  // For an integrand ~ u^{-p} near zero the decrement ratio is 100^{p-1}, so
  // the log-slope below is 1-p: positive means integrable, ~0 means log
  // divergence, negative means power divergence.
  const double s2 = eval(1e-2), s4 = eval(1e-4), s6 = eval(1e-6);
  const double d1 = std::fabs(s4 - s2), d2 = std::fabs(s6 - s4);
  const double scale0 = std::max(1.0, std::fabs(s2));
  if (!std::isfinite(s2) || !std::isfinite(s4) || !std::isfinite(s6)) {
    table.left = ScaleFunctionTable::Limit::divergent;
    table.left_log_slope = -std::numeric_limits<double>::infinity();
  } else if (d2 <= 1e-13 * scale0) {
    table.left = ScaleFunctionTable::Limit::finite;
    table.left_log_slope = 1.0;
  } else if (d1 <= 1e-13 * scale0) {
    table.left = ScaleFunctionTable::Limit::divergent;  // decrements growing from zero
    table.left_log_slope = -1.0;
  } else {
    table.left_log_slope = std::log(d2 / d1) / std::log(1e-2);
    table.left = (table.left_log_slope < 0.05) ? ScaleFunctionTable::Limit::divergent
                                               : ScaleFunctionTable::Limit::finite;
  }

  // Right endpoint: tail comparison over the three largest nodes.
  if (nodes.size() < 3) {
    throw std::invalid_argument("scale_function: need >= 3 nodes for the tail test");
  }
  const std::size_t k = nodes.size();
  const double sA = table.values[k - 3], sB = table.values[k - 2], sC = table.values[k - 1];
  const double g1 = sB - sA, g2 = sC - sB;
  const double scale1 = std::max(1.0, std::fabs(sC));
  if (!std::isfinite(sC)) {
    table.right = ScaleFunctionTable::Limit::divergent;
    table.right_estimate = std::numeric_limits<double>::infinity();
  } else if (std::fabs(g2) <= 1e-13 * scale1) {
    table.right = ScaleFunctionTable::Limit::finite;
    table.right_estimate = sC;
  } else if (g2 < 0.5 * g1) {
    table.right = ScaleFunctionTable::Limit::finite;
    const double q = g2 / g1;  // geometric tail estimate
    table.right_estimate = sC + g2 * q / (1.0 - q);
  } else {
    table.right = ScaleFunctionTable::Limit::divergent;
    table.right_estimate = std::numeric_limits<double>::infinity();
  }
  return table;
}

void write_scale_csv(std::ostream& os, const ScaleFunctionTable& table) {
  char buf[64];
  os << "r,s\n";
  for (std::size_t i = 0; i < table.nodes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", table.nodes[i]);
    os << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", table.values[i]);
    os << ',' << buf << "\n";
  }
}

ExitProbabilityBounds exit_probability_bounds(const std::function<double(double)>& V,
                                              double x0, double x1, double x2) {
  if (!(x1 < x0 && x0 < x2)) {
    throw std::invalid_argument("exit_probability_bounds: need x1 < x0 < x2");
  }
  const double v0 = V(x0), v1 = V(x1), v2 = V(x2);
  if (!(v1 > v2)) {
    throw std::invalid_argument("exit_probability_bounds: V must decrease across the interval");
  }
  ExitProbabilityBounds out;
  out.left_upper = (v0 - v2) / (v1 - v2);
  out.right_lower = (v1 - v0) / (v1 - v2);
  return out;
}

double exit_time_bound(const std::function<double(double)>& u, double x1, double x2) {
  if (!(x1 < x2)) throw std::invalid_argument("exit_time_bound: need x1 < x2");
  const int kPoints = 4097;
  double worst = 0.0;
  if (x1 > 0.0) {
    const double step = std::log(x2 / x1) / (kPoints - 1);
    for (int i = 0; i < kPoints; ++i) {
      worst = std::max(worst, std::fabs(u(x1 * std::exp(step * i))));
    }
  } else {
    const double step = (x2 - x1) / (kPoints - 1);
    for (int i = 0; i < kPoints; ++i) {
      worst = std::max(worst, std::fabs(u(x1 + step * i)));
    }
  }
  return 2.0 * worst;
}

std::vector<GronwallPoint> gronwall_bound(const GronwallInstance& inst,
                                          const std::function<double(double)>& u,
                                          const std::vector<double>& t_grid) {
  if (!(inst.beta > 0.0 && inst.beta < 1.0)) {
    throw std::invalid_argument("gronwall_bound: beta must lie in (0,1)");
  }
  if (!(inst.constant > 0.0)) {
    throw std::invalid_argument("gronwall_bound: C must be positive");
  }
  if (!inst.forcing) throw std::invalid_argument("gronwall_bound: missing forcing a(t)");
  const double om = 1.0 - inst.beta;
  std::vector<GronwallPoint> out;
  out.reserve(t_grid.size());
  double prev_a = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("gronwall_bound: t must be >= 0");
    const double a = inst.forcing(t);
    if (!(a >= 0.0)) throw std::invalid_argument("gronwall_bound: a(t) must be >= 0");
    if (a < prev_a - 1e-12 * std::max(1.0, std::fabs(prev_a))) {
      throw std::invalid_argument("gronwall_bound: a(t) must be non-decreasing");
    }
    prev_a = std::max(prev_a, a);
    GronwallPoint p;
    p.t = t;
    p.observed = u(t);
    p.bound = std::pow(std::pow(a, om) + inst.constant * om * t, 1.0 / om);
    p.holds = p.observed <= p.bound * (1.0 + 1e-9);
    out.push_back(p);
  }
  return out;
}

}  // namespace sdelab
