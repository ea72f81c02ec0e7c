#pragma once

#include "sdelab/types.hpp"

namespace sdelab {

// Radius below which polar quantities are considered numerically undefined.
inline constexpr double kMinRadius = 1e-12;
// Unit-vector tolerance: angles farther than this from the sphere are rejected,
// closer ones are silently renormalized.
inline constexpr double kAngleTol = 1e-9;

struct VectorDecomposition {
  Vec radial;      // (x x^T / |x|^2) v
  Vec tangential;  // v - radial
};

struct MatrixDecomposition {
  Mat radial;      // (x x^T / |x|^2) B
  Mat tangential;  // B - radial
};

VectorDecomposition decompose_vector(const Vec& x, const Vec& v);
MatrixDecomposition decompose_matrix(const Vec& x, const Mat& B);

// Coefficients of the radius/angle dynamics of dX = a dt + b dW at x = r phi:
//   dR   = mu dt + sigma dW_rad            (sigma = |phi^T b|, one net radial noise)
//   dPhi = nu dt + chi dW                  (chi = b_tan / r)
// nu is the exact Ito drift of x -> x/|x|.
struct PolarCoefficients {
  double mu = 0.0;
  double sigma = 0.0;
  Vec nu;
  Mat chi;
};

PolarCoefficients polar_coefficients(const SdeSystem& sys, double r, const Vec& phi);
PolarCoefficients polar_coefficients_at(const SdeSystem& sys, const Vec& x);

// Validates and renormalizes an angle vector (throws beyond kAngleTol).
Vec normalize_angle(const Vec& phi);

}  // namespace sdelab
