#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"
#include "hslimit/model.hpp"

namespace hslimit {

struct StepLimits {
  double cfl_safety = 0.45;
  /// Cap used when both CFL bounds degenerate (vacuum, no drift).
  double dt_max = 1e-2;
};

struct SolveConfig {
  double final_time = 1.0;
  double cfl_safety = 0.45;
  /// Times at which the state is recorded; t = 0 and t = final_time are
  /// always recorded. Must lie in [0, final_time].
  std::vector<double> snapshot_times;
  double density_floor = 1e-14;
  double dt_max = 1e-2;

  /// `count` equispaced times t_k = T k / (count - 1).
  static std::vector<double> equispaced(double final_time, std::size_t count) {
    std::vector<double> t;
    if (count < 2)
      return {0.0, final_time};
    for (std::size_t k = 0; k < count; ++k)
      t.push_back(final_time * static_cast<double>(k) / static_cast<double>(count - 1));
    return t;
  }
};

struct Diagnostics {
  double mass = 0.0;
  double barycenter = 0.0;
  double second_moment = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  double max_density = 0.0;
};

struct Snapshot {
  double time;
  DiscreteDensity density;
  Diagnostics diagnostics;
};

struct Trajectory {
  ModelSpec model;
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
  /// Mass removed by clipping values below the density floor.
  double clipped_mass = 0.0;
};

inline Diagnostics diagnose(const ModelSpec &model, const DiscreteDensity &rho) {
  return {mass(rho),           barycenter(rho),         second_moment(rho),
          energy(model, rho),  dissipation(model, rho), max_density(rho)};
}

namespace detail {

/// Explicit conservative finite-volume update for
///   d_t rho = lap Q(rho) + div(rho (grad V + grad W * rho)).
///
/// Diffusive face flux -(Q_R - Q_L)/h. The drift is upwinded by flux-vector
/// splitting of the cell-centred velocity u = -(grad V + grad W * rho): cell i
/// sends rho_i u_i^+ through its right face and rho_i u_i^- through its left
/// face. Outer faces carry no flux. Only the occupied cell range plus one
/// layer is touched; the stencil cannot spread mass further in one step.
class Stepper {
public:
  explicit Stepper(const ModelSpec &model)
      : model_(model), n_(model.grid.size()), q_(n_, 0.0), u_(n_, 0.0),
        flux_(n_ + 1, 0.0), area_(n_ + 1), volume_(n_) {
    const Grid &g = model.grid;
    for (std::size_t f = 0; f <= n_; ++f)
      area_[f] = g.face_area(f);
    for (std::size_t i = 0; i < n_; ++i)
      volume_[i] = g.cell_volume(i);
    // area * h / volume of the face a cell emits through; 1 on the line.
    exit_ratio_left_.assign(n_, 1.0);
    exit_ratio_right_.assign(n_, 1.0);
    if (!g.is_line())
      for (std::size_t i = 0; i < n_; ++i) {
        exit_ratio_left_[i] = area_[i] * g.h() / volume_[i];
        exit_ratio_right_[i] = area_[i + 1] * g.h() / volume_[i];
      }
    if (!model.potentials.interaction.is_zero() && !g.is_line())
      throw ConfigError("interaction kernels are only supported on line grids");
  }

  void reset_range(std::span<const double> rho) {
    lo_ = n_;
    hi_ = 0;
    for (std::size_t i = 0; i < n_; ++i)
      if (rho[i] > 0.0) {
        lo_ = std::min(lo_, i);
        hi_ = i + 1;
      }
    if (lo_ >= hi_) {
      lo_ = 0;
      hi_ = 0;
    }
  }

  /// Fills Q and velocities on the working range and returns the stable step.
  double prepare(std::span<const double> rho, const StepLimits &limits) {
    const Grid &g = model_.grid;
    const double h = g.h();
    constexpr double guard = 1e-30;
    work_lo_ = lo_ > 0 ? lo_ - 1 : 0;
    work_hi_ = std::min(n_, hi_ + 1);
    if (hi_ == 0) {
      work_lo_ = 0;
      work_hi_ = 0;
    }

    const PressureLaw &law = model_.pressure;
    const Confinement &v = model_.potentials.confinement;
    const Interaction &w = model_.potentials.interaction;
    double m0 = 0.0, m1 = 0.0;
    if (!w.is_zero())
      std::tie(m0, m1) = line_moments(g, rho, work_lo_, work_hi_);

    double max_dq = 0.0;
    double max_speed = 0.0;
    const bool power = law.is_power();
    const double m = law.parameter();
    for (std::size_t i = work_lo_; i < work_hi_; ++i) {
      const double r = rho[i];
      double dq = 0.0;
      if (r > 0.0) {
        q_[i] = law.flux_potential_unchecked(r);
        dq = power ? m * q_[i] / r : law.flux_potential_derivative_unchecked(r);
      } else {
        q_[i] = 0.0;
      }
      max_dq = std::max(max_dq, dq);
      const double x = g.center(i);
      double u = -v.gradient(x);
      if (!w.is_zero())
        u -= w.stiffness() * (x * m0 - m1);
      u_[i] = u;
      if (r > 0.0)
        max_speed = std::max(max_speed, u > 0.0 ? u * exit_ratio_right_[i]
                                                : -u * exit_ratio_left_[i]);
    }
    const double diffusive = h * h / (2.0 * g.dim() * max_dq + guard);
    const double drift = h / (max_speed + guard);
    return std::min(limits.dt_max, limits.cfl_safety * std::min(diffusive, drift));
  }

  /// Applies one update of size dt in place; returns the clipped mass.
  double apply(std::vector<double> &rho, double dt, double floor) {
    if (work_hi_ == 0)
      return 0.0;
    const double h = model_.grid.h();
    const std::size_t f_lo = work_lo_ + 1;
    const std::size_t f_hi = work_hi_; // faces f_lo .. f_hi-1 are interior
    flux_[work_lo_] = 0.0;
    flux_[work_hi_] = 0.0;
    for (std::size_t f = f_lo; f < f_hi; ++f) {
      const std::size_t l = f - 1, r = f;
      flux_[f] = area_[f] * (-(q_[r] - q_[l]) / h + rho[l] * std::max(u_[l], 0.0) +
                             rho[r] * std::min(u_[r], 0.0));
    }
    double clipped = 0.0;
    std::size_t new_lo = n_, new_hi = 0;
    const bool singular = !model_.pressure.is_power();
    for (std::size_t i = work_lo_; i < work_hi_; ++i) {
      double r = rho[i] - dt / volume_[i] * (flux_[i + 1] - flux_[i]);
      if (r < floor) {
        clipped += r * volume_[i];
        r = 0.0;
      } else {
        new_lo = std::min(new_lo, i);
        new_hi = i + 1;
      }
      if (singular && r >= 1.0 - 1e-10)
        throw BlowUpError("singular-law density reached " + std::to_string(r) +
                          " in cell " + std::to_string(i));
      rho[i] = r;
    }
    if (new_hi == 0) {
      lo_ = hi_ = 0;
    } else {
      lo_ = new_lo;
      hi_ = new_hi;
    }
    return clipped;
  }

private:
  const ModelSpec &model_;
  std::size_t n_;
  std::vector<double> q_, u_, flux_, area_, volume_;
  std::vector<double> exit_ratio_left_, exit_ratio_right_;
  std::size_t lo_ = 0, hi_ = 0, work_lo_ = 0, work_hi_ = 0;
};

} // namespace detail

/// c min(h^2 / (2 d max Q'(rho)), h / max drift speed), capped at dt_max.
inline double stable_dt(const ModelSpec &model, const DiscreteDensity &rho,
                        const StepLimits &limits = {}) {
  require_grid(model.grid, rho);
  detail::Stepper stepper(model);
  stepper.reset_range(rho.values());
  return stepper.prepare(rho.values(), limits);
}

/// One conservative explicit step. Throws StabilityError when dt exceeds
/// stable_dt and BlowUpError when a singular-law density reaches 1.
inline DiscreteDensity step(const ModelSpec &model, const DiscreteDensity &rho,
                            double dt, const StepLimits &limits = {},
                            double density_floor = 1e-14) {
  require_grid(model.grid, rho);
  check_admissible(model.pressure, rho);
  if (!(dt >= 0.0))
    throw StabilityError("negative time step");
  detail::Stepper stepper(model);
  stepper.reset_range(rho.values());
  const double bound = stepper.prepare(rho.values(), limits);
  if (dt > bound * (1.0 + 1e-12))
    throw StabilityError("dt = " + std::to_string(dt) + " exceeds the stability bound " +
                         std::to_string(bound));
  std::vector<double> next(rho.values().begin(), rho.values().end());
  stepper.apply(next, dt, density_floor);
  return {model.grid, std::move(next)};
}

/// Integrates from rho0 to cfg.final_time, landing exactly on every snapshot
/// time.
inline Trajectory solve(const ModelSpec &model, const DiscreteDensity &rho0,
                        const SolveConfig &cfg) {
  require_grid(model.grid, rho0);
  check_admissible(model.pressure, rho0);
  if (!(cfg.final_time >= 0.0) || !std::isfinite(cfg.final_time))
    throw ConfigError("final time must be finite and nonnegative");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
    throw ConfigError("cfl safety factor must lie in (0, 1]");

  std::vector<double> times = cfg.snapshot_times;
  for (double t : times)
    if (!(t >= 0.0 && t <= cfg.final_time))
      throw ConfigError("snapshot time " + std::to_string(t) + " outside [0, T]");
  times.push_back(0.0);
  times.push_back(cfg.final_time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  Trajectory traj{model, {}, 0, 0.0};
  traj.snapshots.push_back({0.0, rho0, diagnose(model, rho0)});

  const StepLimits limits{cfg.cfl_safety, cfg.dt_max};
  detail::Stepper stepper(model);
  std::vector<double> state(rho0.values().begin(), rho0.values().end());
  stepper.reset_range(state);
  double t = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    while (t < target) {
      double dt = stepper.prepare(state, limits);
      const bool lands = target - t <= dt * (1.0 + 1e-12);
      if (lands)
        dt = target - t;
      traj.clipped_mass += stepper.apply(state, dt, cfg.density_floor);
      ++traj.steps;
      t = lands ? target : t + dt;
    }
    DiscreteDensity snap(model.grid, state);
    Diagnostics diag = diagnose(model, snap);
    traj.snapshots.push_back({target, std::move(snap), diag});
  }
  return traj;
}

/// Writes snapshot_<k>.csv per snapshot plus diagnostics.csv into `dir`.
inline void write_trajectory(const std::filesystem::path &dir, const Trajectory &traj) {
  std::filesystem::create_directories(dir);
  std::ofstream diag(dir / "diagnostics.csv");
  diag.precision(std::numeric_limits<double>::max_digits10);
  diag << "time,mass,barycenter,second_moment,energy,dissipation,max_density\n";
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto &s = traj.snapshots[k];
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", k);
    std::ofstream out(dir / name);
    write_csv(out, s.density);
    const auto &d = s.diagnostics;
    diag << s.time << ',' << d.mass << ',' << d.barycenter << ',' << d.second_moment << ','
         << d.energy << ',' << d.dissipation << ',' << d.max_density << '\n';
  }
}

} // namespace hslimit
