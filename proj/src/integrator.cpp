#include "sdelab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sdelab/polar.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/stats.hpp"

namespace sdelab {

namespace {

constexpr double kTimescaleDelta = 1e-12;

double clamp_dt(double dt, const StepSchedule& s) {
  return std::min(s.dt_max, std::max(s.dt_min, dt));
}

Trajectory make_trajectory(Representation rep, int n, std::uint64_t seed,
                           int path_index, std::size_t n_checkpoints) {
  Trajectory traj;
  traj.representation = rep;
  traj.dim_state = n;
  traj.seed = seed;
  traj.path_index = path_index;
  traj.times.reserve(n_checkpoints);
  traj.states.reserve(n_checkpoints);
  return traj;
}

[[noreturn]] void fail_non_finite(int path_index, double t) {
  throw SimulationError(path_index,
                        "non-finite state at t = " + std::to_string(t) +
                            " (path " + std::to_string(path_index) + ")");
}

}  // namespace

Trajectory simulate_cartesian(const SdeSystem& sys, const Vec& x0,
                              const StepSchedule& sched, std::uint64_t seed,
                              int path_index, double r_floor) {
  validate_system(sys);
  sched.validate();
  if (x0.size() != sys.dim_state) {
    throw std::invalid_argument("simulate_cartesian: x0 has wrong dimension");
  }
  const int m = sys.dim_noise;
  PathRng rng(seed, static_cast<std::uint32_t>(path_index));
  Trajectory traj = make_trajectory(Representation::cartesian, sys.dim_state, seed,
                                    path_index, sched.checkpoints.size());

  Vec x = x0;
  double t = 0.0;
  std::uint64_t step = 0;
  bool frozen = x.norm() < r_floor;
  if (frozen) traj.floor_events.push_back(0.0);

  Vec dx(sys.dim_state);
  for (double cp : sched.checkpoints) {
    while (t < cp && !frozen) {
      const Vec a = drift_at(sys, x);
      const Mat b = diffusion_at(sys, x);
      const double r = x.norm();
      const double tau = std::min(r / (a.norm() + kTimescaleDelta),
                                  r * r / (b.squaredNorm() + kTimescaleDelta));
      double dt = clamp_dt(sched.relative_scale * tau, sched);
      bool lands = false;
      if (t + dt >= cp) {  // shorten to land exactly on the checkpoint
        dt = cp - t;
        lands = true;
      }
      const double sq = std::sqrt(dt);
      dx = a * dt;
      for (int k = 0; k < m; ++k) {
        dx += b.col(k) * (sq * rng.normal(step, static_cast<std::uint32_t>(k)));
      }
      x += dx;
      ++step;
      t = lands ? cp : t + dt;
      if (!x.allFinite()) fail_non_finite(path_index, t);
      // Components can stay finite while |x|^2 overflows; a path whose radius
      // is no longer representable has left the model's working range.
      const double r_new = x.norm();
      if (!std::isfinite(r_new)) fail_non_finite(path_index, t);
      if (r_new < r_floor) {
        traj.floor_events.push_back(t);
        frozen = true;
      }
    }
    traj.times.push_back(cp);
    traj.states.push_back(x);
  }
  return traj;
}

Trajectory simulate_polar(const SdeSystem& sys, double r0, const Vec& phi0,
                          const StepSchedule& sched, std::uint64_t seed,
                          int path_index, double r_floor) {
  validate_system(sys);
  sched.validate();
  if (phi0.size() != sys.dim_state) {
    throw std::invalid_argument("simulate_polar: phi0 has wrong dimension");
  }
  if (!(r0 >= kMinRadius)) {
    throw std::domain_error("simulate_polar: r0 too close to the origin");
  }
  const int n = sys.dim_state;
  const int m = sys.dim_noise;
  PathRng rng(seed, static_cast<std::uint32_t>(path_index));
  Trajectory traj =
      make_trajectory(Representation::polar, n, seed, path_index, sched.checkpoints.size());

  double r = r0;
  Vec phi = normalize_angle(phi0);
  double t = 0.0;
  std::uint64_t step = 0;
  bool frozen = r < r_floor;
  if (frozen) traj.floor_events.push_back(0.0);

  for (double cp : sched.checkpoints) {
    while (t < cp && !frozen) {
      const PolarCoefficients pc = polar_coefficients(sys, r, phi);
      // Radial scales as in the Cartesian rule; the angle lives on the unit
      // sphere, so its drift/diffusion are compared against scale 1.
      const double tau =
          std::min(std::min(r / (std::fabs(pc.mu) + kTimescaleDelta),
                            r * r / (pc.sigma * pc.sigma + kTimescaleDelta)),
                   std::min(1.0 / (pc.nu.norm() + kTimescaleDelta),
                            1.0 / (pc.chi.squaredNorm() + kTimescaleDelta)));
      double dt = clamp_dt(sched.relative_scale * tau, sched);
      bool lands = false;
      if (t + dt >= cp) {
        dt = cp - t;
        lands = true;
      }
      const double sq = std::sqrt(dt);
      r += pc.mu * dt + pc.sigma * sq * rng.normal(step, 0);
      Vec dphi = pc.nu * dt;
      for (int k = 0; k < m; ++k) {
        dphi += pc.chi.col(k) * (sq * rng.normal(step, static_cast<std::uint32_t>(k + 1)));
      }
      phi += dphi;
      const double pn = phi.norm();
      if (!(pn > 0.5)) {
        // A well-resolved angle step never leaves the unit sphere this far.
        throw SimulationError(path_index, "angle step collapsed; reduce step sizes");
      }
      phi /= pn;
      ++step;
      t = lands ? cp : t + dt;
      if (!std::isfinite(r) || !phi.allFinite()) fail_non_finite(path_index, t);
      if (r < r_floor) {
        traj.floor_events.push_back(t);
        frozen = true;
      }
    }
    Vec state(n + 1);
    state[0] = r;
    state.tail(n) = phi;
    traj.times.push_back(cp);
    traj.states.push_back(state);
  }
  return traj;
}

Trajectory simulate_ode_skeleton(const SdeSystem& sys, const Vec& x0,
                                 const StepSchedule& sched) {
  validate_system(sys);
  sched.validate();
  if (x0.size() != sys.dim_state) {
    throw std::invalid_argument("simulate_ode_skeleton: x0 has wrong dimension");
  }
  Trajectory traj = make_trajectory(Representation::cartesian, sys.dim_state,
                                    /*seed=*/0, /*path_index=*/0, sched.checkpoints.size());
  Vec x = x0;
  double t = 0.0;
  for (double cp : sched.checkpoints) {
    while (t < cp) {
      double dt = sched.dt_max;
      bool lands = false;
      if (t + dt >= cp) {
        dt = cp - t;
        lands = true;
      }
      const Vec k1 = drift_at(sys, x);
      const Vec k2 = drift_at(sys, x + 0.5 * dt * k1);
      const Vec k3 = drift_at(sys, x + 0.5 * dt * k2);
      const Vec k4 = drift_at(sys, x + dt * k3);
      x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = lands ? cp : t + dt;
      if (!x.allFinite() || !std::isfinite(x.norm())) fail_non_finite(0, t);
    }
    traj.times.push_back(cp);
    traj.states.push_back(x);
  }
  return traj;
}

Ensemble simulate_ensemble(const SdeSystem& sys, const Vec& x0, int n_paths,
                           const StepSchedule& sched, std::uint64_t base_seed,
                           const EnsembleOptions& opts) {
  if (n_paths < 1) throw std::invalid_argument("simulate_ensemble: n_paths < 1");
  validate_system(sys);
  sched.validate();
  Ensemble ens;
  ens.schedule = sched;
  ens.base_seed = base_seed;
  ens.r0 = x0.norm();
  ens.paths.resize(n_paths);

  const int threads = std::max(1, opts.threads);
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](int w) {
    try {
      for (int p = w; p < n_paths; p += threads) {
        ens.paths[p] = simulate_cartesian(sys, x0, sched, base_seed, p, opts.r_floor);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return ens;
}

EnsembleSummary summarize_ensemble(const Ensemble& ens, const EnsembleOptions& opts) {
  if (ens.paths.empty()) throw std::invalid_argument("summarize_ensemble: empty ensemble");
  EnsembleSummary sum;
  sum.n_paths = static_cast<int>(ens.paths.size());
  const double t_end = ens.schedule.t_end;
  sum.transience_threshold = opts.transience_threshold.value_or(10.0 * ens.r0);

  int transient = 0, floored = 0;
  sum.terminal_radius_samples.reserve(ens.paths.size());
  for (const auto& p : ens.paths) {
    const double rT = p.radius(p.times.size() - 1);
    sum.terminal_radius_samples.push_back(rT);
    if (rT > sum.transience_threshold) ++transient;
    if (p.floor_hit()) ++floored;
  }
  sum.transience_fraction = static_cast<double>(transient) / sum.n_paths;
  sum.floor_hit_fraction = static_cast<double>(floored) / sum.n_paths;

  // Per-path power-law fits over the default window [t_end/100, t_end];
  // floor-hit paths are excluded from every estimator.
  const double w_lo = t_end / 100.0;
  std::vector<double> slopes, intercepts;
  int excluded = 0;
  for (const auto& p : ens.paths) {
    if (p.floor_hit()) {
      ++excluded;
      continue;
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      const double t = p.times[i];
      if (t < w_lo || t > t_end) continue;
      const double r = p.radius(i);
      if (!(r > 0.0)) continue;
      lx.push_back(std::log(t));
      ly.push_back(std::log(r));
    }
    if (lx.size() < 8) continue;  // too few checkpoints in the window
    const LinearFit fit = least_squares(lx, ly);
    slopes.push_back(fit.slope);
    intercepts.push_back(fit.intercept);
  }
  sum.exponent_fit.paths_excluded = excluded;
  sum.exponent_fit.paths_used = static_cast<int>(slopes.size());
  if (!slopes.empty()) {
    sum.exponent_fit.slope = median(slopes);
    sum.exponent_fit.intercept = median(intercepts);
    // Standard error of the median via the IQR normal-scale estimate.
    const double iqr = quantile(slopes, 0.75) - quantile(slopes, 0.25);
    sum.exponent_fit.stderr_ =
        1.2533 * (iqr / 1.349) / std::sqrt(static_cast<double>(slopes.size()));
  }

  // Median angle increments |Phi(T) - Phi(T/2)| over the dyadic chain.
  for (int k = 3; k >= 0; --k) {
    const double T = t_end / static_cast<double>(1 << k);
    const double half = T / 2.0;
    std::vector<double> inc;
    for (const auto& p : ens.paths) {
      if (p.floor_hit()) continue;
      const int iT = p.checkpoint_index(T);
      const int ih = p.checkpoint_index(half);
      if (iT < 0 || ih < 0) continue;
      inc.push_back((p.angle(iT) - p.angle(ih)).norm());
    }
    if (!inc.empty()) sum.angle_increment_medians.emplace_back(T, median(inc));
  }
  return sum;
}

}  // namespace sdelab
