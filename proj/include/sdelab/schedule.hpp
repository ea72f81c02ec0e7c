#pragma once

#include <vector>

namespace sdelab {

// Adaptive step-size policy plus the exact list of times at which state is
// recorded.  dt = clamp(relative_scale * tau_local, dt_min, dt_max), then
// shortened further so every checkpoint is hit exactly.
struct StepSchedule {
  double t_end = 0.0;
  double dt_max = 0.1;
  double dt_min = 1e-10;
  double relative_scale = 0.01;  // epsilon in dt = epsilon * tau_local
  std::vector<double> checkpoints;

  void validate() const;
};

// 64 log-spaced checkpoints plus the dyadic chain t_end/2^k (k = 0..4) used by
// the angle-stabilization diagnostics; sorted, deduplicated, ending at t_end.
StepSchedule default_schedule(double t_end, double dt_max = 0.1,
                              double dt_min = 1e-10, double relative_scale = 0.01,
                              int log_points = 64);

}  // namespace sdelab
