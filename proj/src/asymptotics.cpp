#include "sdelab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "sdelab/rng.hpp"
#include "sdelab/stats.hpp"

namespace sdelab {

double predicted_radius(const PowerLawModel& model, const Vec& phi, double t) {
  if (!(model.alpha > -1.0 && model.alpha < 1.0)) {
    throw std::invalid_argument("predicted_radius: alpha must lie in (-1, 1)");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("predicted_radius: t must be >= 0");
  const double m = model.big_m ? model.big_m(phi) : 1.0;
  if (!(m > 0.0)) throw std::domain_error("predicted_radius: M(phi) must be positive");
  const double om = 1.0 - model.alpha;
  return std::pow(om * m * t, 1.0 / om);
}

namespace {

LinearFit loglog_fit(const Trajectory& traj, const FitWindow& w) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < w.t_lo || t > w.t_hi) continue;
    const double r = traj.radius(i);
    if (!(t > 0.0) || !(r > 0.0)) {
      throw std::domain_error("fit_power_law: nonpositive time or radius in window");
    }
    lx.push_back(std::log(t));
    ly.push_back(std::log(r));
  }
  if (lx.size() < 8) {
    throw std::invalid_argument("fit_power_law: fewer than 8 checkpoints in window");
  }
  return least_squares(lx, ly);
}

}  // namespace

PowerLawFit fit_power_law(const Trajectory& traj, const FitWindow& window) {
  if (!(window.t_lo < window.t_hi)) {
    throw std::invalid_argument("fit_power_law: empty window");
  }
  for (double e : traj.floor_events) {
    if (e <= window.t_hi) {
      throw std::invalid_argument("fit_power_law: floor event inside the fit window");
    }
  }
  const LinearFit fit = loglog_fit(traj, window);
  PowerLawFit out;
  out.exponent = fit.slope;
  out.prefactor = std::exp(fit.intercept);
  out.stderr_ = fit.slope_stderr;
  out.paths_used = 1;
  return out;
}

PowerLawFit fit_power_law(const Ensemble& ens, const FitWindow& window) {
  if (!(window.t_lo < window.t_hi)) {
    throw std::invalid_argument("fit_power_law: empty window");
  }
  std::vector<double> slopes, intercepts;
  int excluded = 0;
  for (const auto& p : ens.paths) {
    if (p.floor_hit_before(window.t_hi)) {
      ++excluded;
      continue;
    }
    const LinearFit fit = loglog_fit(p, window);
    slopes.push_back(fit.slope);
    intercepts.push_back(fit.intercept);
  }
  if (slopes.empty()) {
    throw std::invalid_argument("fit_power_law: all paths excluded");
  }
  PowerLawFit out;
  out.exponent = median(slopes);
  out.prefactor = std::exp(median(intercepts));
  out.exponent_iqr = quantile(slopes, 0.75) - quantile(slopes, 0.25);
  out.stderr_ = 1.2533 * (out.exponent_iqr / 1.349) /
                std::sqrt(static_cast<double>(slopes.size()));
  out.paths_used = static_cast<int>(slopes.size());
  out.paths_excluded = excluded;
  return out;
}

AngleConditionReport check_angle_conditions(const AngleStabilizationSpec& spec) {
  if (!(spec.gamma > 0.0)) {
    throw std::invalid_argument("check_angle_conditions: gamma must be positive");
  }
  AngleConditionReport rep;
  rep.drift_margin = spec.delta1 - 1.0 / spec.gamma;
  rep.diffusion_margin = spec.delta2 - 1.0 / (2.0 * spec.gamma);
  rep.satisfied = rep.drift_margin > 0.0 && rep.diffusion_margin > 0.0;
  return rep;
}

AngleDiagnostics angle_stabilization_diagnostics(const Ensemble& ens) {
  if (ens.paths.empty()) {
    throw std::invalid_argument("angle_stabilization_diagnostics: empty ensemble");
  }
  const double t_end = ens.schedule.t_end;
  AngleDiagnostics diag;
  for (const auto& p : ens.paths) {
    if (p.floor_hit()) ++diag.paths_excluded;
  }
  for (int k = 3; k >= 0; --k) {
    const double T = t_end / static_cast<double>(1 << k);
    const double half = 0.5 * T;
    std::vector<double> inc;
    bool missing = false;
    for (const auto& p : ens.paths) {
      if (p.floor_hit()) continue;
      const int iT = p.checkpoint_index(T);
      const int ih = p.checkpoint_index(half);
      if (iT < 0 || ih < 0) {
        missing = true;
        break;
      }
      inc.push_back((p.angle(iT) - p.angle(ih)).norm());
    }
    if (missing || inc.empty()) continue;
    diag.increments.emplace_back(T, median(inc));
  }
  if (diag.increments.size() < 3) {
    throw std::invalid_argument(
        "angle_stabilization_diagnostics: need checkpoints at T and T/2 for at "
        "least 3 dyadic horizons");
  }
  return diag;
}

std::vector<double> log_time_grid(double t_lo, double t_hi, int points_per_decade) {
  if (!(t_lo > 0.0 && t_hi > t_lo)) {
    throw std::invalid_argument("log_time_grid: need 0 < t_lo < t_hi");
  }
  if (points_per_decade < 4) {
    throw std::invalid_argument("log_time_grid: need >= 4 points per decade");
  }
  const double decades = std::log10(t_hi / t_lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
  std::vector<double> g(count);
  const double step = std::log(t_hi / t_lo) / (count - 1);
  for (int i = 0; i < count; ++i) g[i] = t_lo * std::exp(step * i);
  g.back() = t_hi;
  return g;
}

ItoDecayReport ito_integral_decay(const std::function<double(double)>& b, double beta,
                                  double gamma, int n_paths,
                                  const std::vector<double>& t_grid, std::uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("ito_integral_decay: n_paths < 1");
  if (t_grid.size() < 8) throw std::invalid_argument("ito_integral_decay: grid too short");
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !(t_grid[i] < t_grid[i + 1])) {
      throw std::invalid_argument("ito_integral_decay: grid must be positive increasing");
    }
  }
  const double t_hi = t_grid.back();
  const double last_lo = t_hi / 10.0;
  const double prev_lo = t_hi / 100.0;

  ItoDecayReport rep;
  rep.gamma = gamma;
  rep.beta = beta;
  rep.sup_last_decade.resize(n_paths);
  rep.sup_prev_decade.resize(n_paths);

  for (int p = 0; p < n_paths; ++p) {
    PathRng rng(seed, static_cast<std::uint32_t>(p));
    double m = 0.0;
    double sup_last = 0.0, sup_prev = 0.0;
    double t = 0.0;
    std::uint64_t step = 0;
    for (double target : t_grid) {
      // Euler-Maruyama sum for int b dB with substeps capped at 2% of the
      // current time (and an absolute cap for the first segment).
      while (t < target) {
        double dt = std::max(1e-4, 0.02 * t);
        if (t + dt >= target) {
          dt = target - t;
          t = target;
        } else {
          t += dt;
        }
        m += b(t - dt) * std::sqrt(dt) * rng.normal(step++, 0);
      }
      const double stat = std::fabs(m) / std::pow(target, gamma);
      if (target >= last_lo) {
        sup_last = std::max(sup_last, stat);
      } else if (target >= prev_lo) {
        sup_prev = std::max(sup_prev, stat);
      }
    }
    rep.sup_last_decade[p] = sup_last;
    rep.sup_prev_decade[p] = sup_prev;
  }
  rep.p95_last = quantile(rep.sup_last_decade, 0.95);
  rep.p95_prev = quantile(rep.sup_prev_decade, 0.95);
  return rep;
}

RadiusRatioReport sde_ode_equivalence(const Trajectory& sde, const Trajectory& ode,
                                      const FitWindow& window) {
  if (sde.times.size() != ode.times.size()) {
    throw std::invalid_argument("sde_ode_equivalence: checkpoint grids differ");
  }
  RadiusRatioReport rep;
  std::vector<double> last_decade;
  const double lo = window.t_hi / 10.0;
  for (std::size_t i = 0; i < sde.times.size(); ++i) {
    if (std::fabs(sde.times[i] - ode.times[i]) >
        1e-9 * std::max(1.0, std::fabs(sde.times[i]))) {
      throw std::invalid_argument("sde_ode_equivalence: checkpoint grids differ");
    }
    const double t = sde.times[i];
    if (t < window.t_lo || t > window.t_hi) continue;
    const double denom = ode.radius(i);
    if (!(denom > 0.0)) {
      rep.ode_hit_zero = true;
      continue;
    }
    const double ratio = sde.radius(i) / denom;
    rep.times.push_back(t);
    rep.ratios.push_back(ratio);
    if (t >= lo) last_decade.push_back(ratio);
  }
  if (last_decade.empty()) {
    throw std::invalid_argument("sde_ode_equivalence: no checkpoints in the last decade");
  }
  rep.last_decade_median = median(last_decade);
  rep.deviation = std::fabs(rep.last_decade_median - 1.0);
  return rep;
}

LiminfReport liminf_lower_bound_check(const Ensemble& ens, double a2, double alpha) {
  if (!(alpha > -1.0 && alpha < 1.0)) {
    throw std::invalid_argument("liminf_lower_bound_check: alpha must lie in (-1,1)");
  }
  if (!(a2 > 0.0)) throw std::invalid_argument("liminf_lower_bound_check: a2 must be > 0");
  const double om = 1.0 - alpha;
  LiminfReport rep;
  rep.threshold = 0.8 * std::pow(om * a2, 1.0 / om);
  const double t_hi = ens.schedule.t_end;
  const double t_lo = t_hi / 10.0;
  int passed = 0, used = 0;
  for (const auto& p : ens.paths) {
    if (p.floor_hit()) {
      ++rep.paths_excluded;
      continue;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      const double t = p.times[i];
      if (t < t_lo || t > t_hi) continue;
      worst = std::min(worst, p.radius(i) / std::pow(t, 1.0 / om));
    }
    if (!std::isfinite(worst)) continue;
    ++used;
    if (worst >= rep.threshold) ++passed;
  }
  if (used == 0) throw std::invalid_argument("liminf_lower_bound_check: all paths excluded");
  rep.pass_fraction = static_cast<double>(passed) / used;
  return rep;
}

}  // namespace sdelab
