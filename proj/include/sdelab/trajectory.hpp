#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sdelab/types.hpp"

namespace sdelab {

enum class Representation { cartesian, polar };

// Checkpointed sample path.  Cartesian states are x in R^n; polar states are
// stacked (r, phi) in R^{1+n}.  floor_events lists the times at which the
// radius first crossed below the floor (the path is frozen from then on).
struct Trajectory {
  Representation representation = Representation::cartesian;
  int dim_state = 0;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> floor_events;
  std::uint64_t seed = 0;
  int path_index = 0;

  double radius(std::size_t i) const;
  Vec angle(std::size_t i) const;
  bool floor_hit() const { return !floor_events.empty(); }
  bool floor_hit_before(double t) const;
  // Index of the checkpoint with time equal to t (tolerance 1e-9 relative);
  // -1 when absent.
  int checkpoint_index(double t) const;
};

// CSV schema: header "t,x1,..,xn" or "t,r,phi1,..,phin"; one row per
// checkpoint; floats with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace sdelab
