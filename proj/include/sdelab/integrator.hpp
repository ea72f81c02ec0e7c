#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sdelab/schedule.hpp"
#include "sdelab/trajectory.hpp"
#include "sdelab/types.hpp"

namespace sdelab {

inline constexpr double kDefaultRadiusFloor = 1e-3;

// Euler-Maruyama in Cartesian coordinates with adaptive steps
//   tau_local = min(|x|/(|a|+delta), |x|^2/(|b|_F^2+delta)), delta = 1e-12.
// Checkpoints are hit exactly.  Crossing below r_floor freezes the path
// (recorded in floor_events); a non-finite state throws SimulationError.
Trajectory simulate_cartesian(const SdeSystem& sys, const Vec& x0,
                              const StepSchedule& sched, std::uint64_t seed,
                              int path_index = 0, double r_floor = kDefaultRadiusFloor);

// Euler-Maruyama on the radius/angle pair driven by polar_coefficients, with
// the angle renormalized to the unit sphere after every step.  The radial and
// angular noises are drawn independently, so agreement with the Cartesian
// simulation is distributional, not pathwise.
Trajectory simulate_polar(const SdeSystem& sys, double r0, const Vec& phi0,
                          const StepSchedule& sched, std::uint64_t seed,
                          int path_index = 0, double r_floor = kDefaultRadiusFloor);

// Classical RK4 on dx/dt = a(x) at fixed dt = dt_max (noise ignored): the
// deterministic skeleton used for the SDE/ODE comparison.
Trajectory simulate_ode_skeleton(const SdeSystem& sys, const Vec& x0,
                                 const StepSchedule& sched);

struct Ensemble {
  std::vector<Trajectory> paths;  // indexed by path_index
  StepSchedule schedule;
  std::uint64_t base_seed = 0;
  double r0 = 0.0;
};

struct ExponentFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
  int paths_used = 0;
  int paths_excluded = 0;
  bool valid() const { return paths_used > 0; }
};

struct EnsembleSummary {
  int n_paths = 0;
  double transience_fraction = 0.0;  // fraction with R(t_end) > threshold
  double floor_hit_fraction = 0.0;
  double transience_threshold = 0.0;
  ExponentFit exponent_fit;  // per-path log-log fits: median slope/intercept
  std::vector<std::pair<double, double>> angle_increment_medians;  // (T, median |Phi(T)-Phi(T/2)|)
  std::vector<double> terminal_radius_samples;  // by path_index
};

struct EnsembleOptions {
  double r_floor = kDefaultRadiusFloor;
  // Default transience threshold: 10 * r0.
  std::optional<double> transience_threshold;
  int threads = 1;
};

// Runs n_paths independent paths (path_index = 0..n_paths-1, each on its own
// counter-RNG stream) and merges them in index order, so results are
// bit-identical for any thread count.
Ensemble simulate_ensemble(const SdeSystem& sys, const Vec& x0, int n_paths,
                           const StepSchedule& sched, std::uint64_t base_seed,
                           const EnsembleOptions& opts = {});

EnsembleSummary summarize_ensemble(const Ensemble& ensemble,
                                   const EnsembleOptions& opts = {});

}  // namespace sdelab
