#include "sdelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdelab {

namespace {

void require_clean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("empty sample");
  for (double x : v) {
    if (std::isnan(x)) throw std::invalid_argument("sample contains NaN");
  }
}

}  // namespace

double median(std::vector<double> v) {
  require_clean(v);
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

double quantile(std::vector<double> v, double q) {
  require_clean(v);
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile level outside [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[lo + 1];
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("least_squares: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("least_squares: need >= 2 points");
  require_clean(x);
  require_clean(y);
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = y[i] - (fit.slope * x[i] + fit.intercept);
      ss += r * r;
    }
    fit.slope_stderr = std::sqrt(ss / ((n - 2) * sxx));
  }
  return fit;
}

double ks_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // Alternating series; terms decay like exp(-2 j^2 lambda^2).
  const double a2 = -2.0 * lambda * lambda;
  double fac = 2.0, sum = 0.0, term_before = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = fac * std::exp(a2 * j * j);
    sum += term;
    if (std::fabs(term) <= 0.001 * term_before || std::fabs(term) <= 1e-12 * sum) {
      return std::min(1.0, std::max(0.0, sum));
    }
    fac = -fac;
    term_before = std::fabs(term);
  }
  return 1.0;  // series failed to converge: lambda ~ 0, distribution mass ~ 1
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require_clean(a);
  require_clean(b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n1 = a.size(), n2 = b.size();
  std::size_t i = 0, j = 0;
  double fn1 = 0.0, fn2 = 0.0, d = 0.0;
  while (i < n1 && j < n2) {
    const double d1 = a[i], d2 = b[j];
    if (d1 <= d2) fn1 = static_cast<double>(++i) / n1;
    if (d2 <= d1) fn2 = static_cast<double>(++j) / n2;
    d = std::max(d, std::fabs(fn2 - fn1));
  }
  const double en = std::sqrt(static_cast<double>(n1) * n2 / (n1 + n2));
  KsResult out;
  out.statistic = d;
  out.p_value = ks_survival((en + 0.12 + 0.11 / en) * d);
  return out;
}

}  // namespace sdelab
