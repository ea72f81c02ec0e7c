#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace sdelab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Coefficients of dX = a(X) dt + b(X) dW with X in R^n and W an m-dimensional
// Brownian motion.  The maps must accept any x in R^n and return finite values
// away from the origin; the integrator enforces finiteness of the state.
struct SdeSystem {
  int dim_state = 0;  // n >= 2
  int dim_noise = 0;  // m >= 1
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&)> diffusion;
  std::string label;
};

// Fatal per-path failure (non-finite state, coefficient blow-up, ...).
struct SimulationError : std::runtime_error {
  int path_index;
  SimulationError(int path, const std::string& what)
      : std::runtime_error(what), path_index(path) {}
};

// Dimension-checked coefficient evaluation.
Vec drift_at(const SdeSystem& sys, const Vec& x);
Mat diffusion_at(const SdeSystem& sys, const Vec& x);

void validate_system(const SdeSystem& sys);

}  // namespace sdelab
