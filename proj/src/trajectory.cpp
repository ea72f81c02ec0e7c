#include "sdelab/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace sdelab {

double Trajectory::radius(std::size_t i) const {
  const Vec& s = states.at(i);
  if (representation == Representation::polar) return s[0];
  return s.norm();
}

Vec Trajectory::angle(std::size_t i) const {
  const Vec& s = states.at(i);
  if (representation == Representation::polar) return s.tail(s.size() - 1);
  const double r = s.norm();
  if (!(r > 0.0)) throw std::domain_error("angle undefined at the origin");
  return s / r;
}

bool Trajectory::floor_hit_before(double t) const {
  for (double e : floor_events) {
    if (e <= t) return true;
  }
  return false;
}

int Trajectory::checkpoint_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::fabs(times[i] - t) <= 1e-9 * std::max(1.0, std::fabs(t))) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  char buf[64];
  const int n = traj.dim_state;
  if (traj.representation == Representation::cartesian) {
    os << "t";
    for (int j = 1; j <= n; ++j) os << ",x" << j;
  } else {
    os << "t,r";
    for (int j = 1; j <= n; ++j) os << ",phi" << j;
  }
  os << "\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", traj.times[i]);
    os << buf;
    const Vec& s = traj.states[i];
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", s[j]);
      os << ',' << buf;
    }
    os << "\n";
  }
}

}  // namespace sdelab
