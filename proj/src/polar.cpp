#include "sdelab/polar.hpp"

#include <cmath>

namespace sdelab {

Vec drift_at(const SdeSystem& sys, const Vec& x) {
  Vec a = sys.drift(x);
  if (a.size() != sys.dim_state) {
    throw std::invalid_argument("drift returned wrong dimension for '" + sys.label + "'");
  }
  return a;
}

Mat diffusion_at(const SdeSystem& sys, const Vec& x) {
  Mat b = sys.diffusion(x);
  if (b.rows() != sys.dim_state || b.cols() != sys.dim_noise) {
    throw std::invalid_argument("diffusion returned wrong shape for '" + sys.label + "'");
  }
  return b;
}

void validate_system(const SdeSystem& sys) {
  if (sys.dim_state < 2) throw std::invalid_argument("state dimension must be >= 2");
  if (sys.dim_noise < 1) throw std::invalid_argument("noise dimension must be >= 1");
  if (!sys.drift || !sys.diffusion) {
    throw std::invalid_argument("system is missing drift or diffusion");
  }
}

VectorDecomposition decompose_vector(const Vec& x, const Vec& v) {
  if (x.size() != v.size()) throw std::invalid_argument("decompose_vector: size mismatch");
  const double nsq = x.squaredNorm();
  if (!(nsq > 0.0)) throw std::domain_error("decompose_vector: undefined at the origin");
  VectorDecomposition out;
  out.radial = x * (x.dot(v) / nsq);
  out.tangential = v - out.radial;
  return out;
}

MatrixDecomposition decompose_matrix(const Vec& x, const Mat& B) {
  if (x.size() != B.rows()) throw std::invalid_argument("decompose_matrix: size mismatch");
  const double nsq = x.squaredNorm();
  if (!(nsq > 0.0)) throw std::domain_error("decompose_matrix: undefined at the origin");
  MatrixDecomposition out;
  out.radial = x * (x.transpose() * B) / nsq;
  out.tangential = B - out.radial;
  return out;
}

Vec normalize_angle(const Vec& phi) {
  const double n = phi.norm();
  if (std::fabs(n - 1.0) > kAngleTol) {
    throw std::invalid_argument("angle vector is not on the unit sphere");
  }
  return phi / n;
}

PolarCoefficients polar_coefficients_at(const SdeSystem& sys, const Vec& x) {
  const double r = x.norm();
  if (!(r >= kMinRadius)) {
    throw std::domain_error("polar coefficients undefined this close to the origin");
  }
  const Vec phi = x / r;
  const Vec a = drift_at(sys, x);
  const Mat b = diffusion_at(sys, x);

  const Vec bt_phi = b.transpose() * phi;          // m-vector phi^T b
  const Mat b_tan = b - phi * bt_phi.transpose();  // tangential diffusion block

  PolarCoefficients out;
  out.mu = phi.dot(a) + b_tan.squaredNorm() / (2.0 * r);
  out.sigma = bt_phi.norm();
  out.chi = b_tan / r;

  // Exact Ito drift of h(x) = x/|x|:
  //   nu = a_tan/r + ( -S phi - tr(S) phi/2 + (3/2)(phi^T S phi) phi ) / r^2,
  // with S = b b^T.  Note phi^T nu = -|chi|_F^2 / 2, which is exactly the
  // curvature correction that keeps |Phi| = 1 under the Ito dynamics.
  const Vec a_tan = a - phi * phi.dot(a);
  const Vec s_phi = b * bt_phi;                 // S phi
  const double phi_s_phi = bt_phi.squaredNorm();  // phi^T S phi
  const double tr_s = b.squaredNorm();            // tr(S) = |b|_F^2
  out.nu = a_tan / r +
           (-s_phi - 0.5 * tr_s * phi + 1.5 * phi_s_phi * phi) / (r * r);
  return out;
}

PolarCoefficients polar_coefficients(const SdeSystem& sys, double r, const Vec& phi) {
  if (!(r >= kMinRadius)) {
    throw std::domain_error("polar coefficients undefined this close to the origin");
  }
  // Delegate through x = r*phi so both entry points run the identical code
  // path (bit-for-bit equal results however the point is presented).
  return polar_coefficients_at(sys, r * normalize_angle(phi));
}

}  // namespace sdelab
