#include "sdelab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace sdelab {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double m, double fm, double whole,
                    double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double h6 = (b - a) / 12.0;
  const double left = h6 * (fa + 4.0 * flm + fm);
  const double right = h6 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Second acceptance clause: once delta is at the rounding floor of the
  // panel values, further subdivision only chases noise (this caps the work
  // on huge integrands where the absolute tolerance is unreachable).
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol ||
      std::fabs(delta) <= 1e-13 * (std::fabs(left) + std::fabs(right))) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double panel_tol, int max_depth) {
  if (panel_tol <= 0.0) throw std::invalid_argument("adaptive_simpson: tol <= 0");
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
    throw std::domain_error("adaptive_simpson: non-finite integrand");
  }
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return sign * simpson_step(f, a, fa, b, fb, m, fm, whole, panel_tol, max_depth);
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, double anchor,
                                       double panel_tol)
    : f_(std::move(f)), tol_(panel_tol) {
  known_[anchor] = 0.0;
}

double CumulativeIntegral::operator()(double x) {
  auto exact = known_.find(x);
  if (exact != known_.end()) return exact->second;
  // Integrate from the nearest cached node (shorter spans keep the adaptive
  // subdivisions local and the cache consistent to the panel tolerance).
  auto above = known_.lower_bound(x);
  double x0, f0;
  if (above == known_.begin()) {
    x0 = above->first;
    f0 = above->second;
  } else if (above == known_.end()) {
    auto below = std::prev(above);
    x0 = below->first;
    f0 = below->second;
  } else {
    auto below = std::prev(above);
    if (x - below->first <= above->first - x) {
      x0 = below->first;
      f0 = below->second;
    } else {
      x0 = above->first;
      f0 = above->second;
    }
  }
  const double value = f0 + adaptive_simpson(f_, x0, x, tol_);
  known_[x] = value;
  return value;
}

}  // namespace sdelab
