#pragma once

#include <vector>

namespace sdelab {

// Order statistics (copies its input; NaNs are rejected).
double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);  // q in [0,1], linear interpolation

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int n = 0;
};

// Ordinary least squares y ~ slope*x + intercept; requires >= 3 points for a
// standard error (returns 0 stderr at n == 2).
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
// Q_KS(( sqrt(ne) + 0.12 + 0.11/sqrt(ne) ) * D), ne = n1*n2/(n1+n2).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Kolmogorov survival function Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double ks_survival(double lambda);

}  // namespace sdelab
