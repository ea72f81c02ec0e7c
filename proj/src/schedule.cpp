#include "sdelab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdelab {

void StepSchedule::validate() const {
  if (!(t_end > 0.0)) throw std::invalid_argument("schedule: t_end must be positive");
  if (!(dt_min > 0.0) || !(dt_max >= dt_min)) {
    throw std::invalid_argument("schedule: need 0 < dt_min <= dt_max");
  }
  if (!(relative_scale > 0.0) || relative_scale > 1.0) {
    throw std::invalid_argument("schedule: relative_scale must lie in (0,1]");
  }
  if (checkpoints.empty()) throw std::invalid_argument("schedule: no checkpoints");
  double prev = -1.0;
  for (double c : checkpoints) {
    if (!(c >= 0.0) || c > t_end) {
      throw std::invalid_argument("schedule: checkpoint outside [0, t_end]");
    }
    if (c <= prev) throw std::invalid_argument("schedule: checkpoints must increase strictly");
    prev = c;
  }
}

StepSchedule default_schedule(double t_end, double dt_max, double dt_min,
                              double relative_scale, int log_points) {
  if (!(t_end > 0.0)) throw std::invalid_argument("default_schedule: t_end must be positive");
  StepSchedule s;
  s.t_end = t_end;
  s.dt_max = dt_max;
  s.dt_min = dt_min;
  s.relative_scale = relative_scale;

  std::vector<double> pts;
  const double t0 = std::min(std::max(dt_max, 1e-2), t_end);
  if (log_points < 2 || t0 >= t_end) {
    pts.push_back(t_end);
  } else {
    const double ratio = std::log(t_end / t0) / (log_points - 1);
    for (int i = 0; i < log_points; ++i) {
      pts.push_back(t0 * std::exp(ratio * i));
    }
    pts.back() = t_end;  // kill rounding residue on the last node
  }
  // Dyadic chain for angle increment diagnostics: T and T/2 both present.
  for (int k = 0; k <= 4; ++k) {
    pts.push_back(t_end / static_cast<double>(1 << k));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  s.checkpoints = std::move(pts);
  s.validate();
  return s;
}

}  // namespace sdelab
