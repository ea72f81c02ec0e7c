#pragma once

#include <functional>
#include <map>

namespace sdelab {

// Recursive adaptive Simpson quadrature.  `panel_tol` is the absolute
// tolerance per panel; the classic |S_fine - S_coarse| < 15 tol acceptance
// test is used, with Richardson correction on accepted panels.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double panel_tol, int max_depth = 48);

// Lazily evaluated antiderivative F(x) = int_anchor^x f(u) du.  Values are
// cached so repeated scattered evaluations (e.g. inside a nested quadrature)
// only integrate over the gap to the nearest known node.
class CumulativeIntegral {
 public:
  CumulativeIntegral(std::function<double(double)> f, double anchor, double panel_tol);
  double operator()(double x);

 private:
  std::function<double(double)> f_;
  double tol_;
  std::map<double, double> known_;  // x -> F(x)
};

}  // namespace sdelab
