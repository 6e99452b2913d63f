#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"
#include "hslimit/potentials.hpp"
#include "hslimit/quadrature.hpp"

namespace hslimit {

/// Global energy minimiser for a radial confinement V:
///   finite m:  ((m-1)/m (C_m - V)_+)^{1/(m-1)}
///   m = inf:   indicator of {V < C_inf}, a set of measure 1.
struct StationaryProfile {
  enum class Kind { finite_m, infinity };

  Kind kind = Kind::infinity;
  double m = std::numeric_limits<double>::infinity();
  double constant = 0.0;
  double support_radius = 0.0;
  Confinement potential = Confinement::zero();
  int dim = 1;

  /// Density at a point of norm |x|.
  double operator()(double x) const {
    const double level = constant - potential.value(std::abs(x));
    if (kind == Kind::infinity)
      return level > 0.0 ? 1.0 : 0.0;
    if (level <= 0.0)
      return 0.0;
    return std::pow((m - 1.0) / m * level, 1.0 / (m - 1.0));
  }

  /// The strictly convex regime (alpha > 0) is where the rate theorems apply.
  bool within_hypotheses() const noexcept { return potential.hessian_lower() > 0.0; }
};

/// Radius of the unit-measure ball, the support radius at m = inf.
inline double limit_support_radius(int d) { return std::pow(unit_ball_volume(d), -1.0 / d); }

/// C_inf = V(R_inf): the level whose sublevel set has measure 1.
inline double limit_constant(const Confinement &v, int d) {
  if (v.kind() == Confinement::Kind::zero)
    throw ConfigError("stationary states need a confining potential");
  const double c = v.value(limit_support_radius(d));
  if (!(c > 0.0))
    throw ConfigError("potential " + v.describe() +
                      " has a flat region of measure >= 1; no stationary state");
  return c;
}

namespace detail {

inline double sphere_density(int d, double r) {
  return d == 1 ? 2.0 : d * unit_ball_volume(d) * std::pow(r, d - 1);
}

inline double profile_value(const Confinement &v, double m, double level_c, double r) {
  const double level = level_c - v.value(r);
  return level > 0.0 ? std::pow((m - 1.0) / m * level, 1.0 / (m - 1.0)) : 0.0;
}

/// Integral over r in [0, R] of g(r) times the sphere density, split at the
/// flat radius and handled as Hölder-singular at R.
template <class G>
double radial_integral(const Confinement &v, int d, double radius, double sup_abs, G &&g) {
  auto integrand = [&](double r) { return g(r) * sphere_density(d, r); };
  const double bound = sup_abs * sphere_density(d, std::max(radius, 1e-300));
  double total = 0.0;
  double start = 0.0;
  if (v.kind() == Confinement::Kind::flat) {
    start = std::min(v.flat_radius(), radius);
    total += integrate_adaptive(integrand, 0.0, start, 1e-14);
  }
  return total + integrate_to_singular_end(integrand, start, radius, bound, 1e-14, 1e-15);
}

} // namespace detail

/// Analytic mass of the finite-m profile with constant `level_c`.
inline double profile_mass(const Confinement &v, double m, int d, double level_c) {
  if (!(level_c > 0.0))
    return 0.0;
  const double radius = v.radius_at_level(level_c);
  const double peak = detail::profile_value(v, m, level_c, 0.0);
  return detail::radial_integral(v, d, radius, peak, [&](double r) {
    return detail::profile_value(v, m, level_c, r);
  });
}

/// Normalisation constant C_m: bisection on the increasing mass map.
inline double solve_cm(const Confinement &v, double m, int d) {
  if (!(m > 1.0) || !std::isfinite(m))
    throw DomainError("solve_cm needs a finite m > 1");
  if (d < 1)
    throw DomainError("dimension must be >= 1");
  const double c_inf = limit_constant(v, d);
  auto defect = [&](double c) { return profile_mass(v, m, d, c) - 1.0; };
  double lo = 0.5 * c_inf;
  for (int k = 0; k < 200 && defect(lo) >= 0.0; ++k)
    lo *= 0.5;
  double hi = c_inf;
  while (defect(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e3 * c_inf)
      throw ConfigError("C_m bracket exceeded 1e3 * C_inf for m = " + std::to_string(m));
  }
  return bisect_increasing(defect, lo, hi);
}

inline StationaryProfile stationary_profile(const Confinement &v, double m, int d) {
  StationaryProfile p;
  p.potential = v;
  p.dim = d;
  if (std::isinf(m)) {
    p.kind = StationaryProfile::Kind::infinity;
    p.constant = limit_constant(v, d);
    p.support_radius = limit_support_radius(d);
  } else {
    p.kind = StationaryProfile::Kind::finite_m;
    p.m = m;
    p.constant = solve_cm(v, m, d);
    p.support_radius = v.radius_at_level(p.constant);
  }
  return p;
}

namespace detail {

/// Cell average of the profile: 4-point Gauss-Legendre on the part of the cell
/// inside the support, weighted by the sphere density on radial grids.
inline double cell_average(const StationaryProfile &p, const Grid &g, std::size_t i) {
  static constexpr std::array<double, 4> nodes = {-0.8611363115940526, -0.3399810435848563,
                                                  0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> weights = {0.3478548451374538, 0.6521451548625461,
                                                    0.6521451548625461, 0.3478548451374538};
  const double lo = g.face(i), hi = g.face(i + 1);
  const double radius = p.support_radius;
  auto piece = [&](double a, double b) {
    if (b <= a)
      return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double x = 0.5 * (a + b) + 0.5 * (b - a) * nodes[k];
      const double w = g.is_line() ? 1.0 : sphere_density(g.dim(), x);
      acc += weights[k] * w * p(x);
    }
    return 0.5 * (b - a) * acc;
  };
  const double a = std::max(lo, -radius), b = std::min(hi, radius);
  return piece(a, b) / g.cell_volume(i);
}

} // namespace detail

/// Discretises a profile on `grid` (line for d = 1, radial otherwise) and
/// renormalises to unit discrete mass. The support must fit in the grid.
inline DiscreteDensity discretize(const StationaryProfile &p, const Grid &grid) {
  if (grid.is_line() ? p.dim != 1 : grid.dim() != p.dim)
    throw GridMismatch("grid dimension does not match the stationary profile");
  if (p.support_radius > grid.half_width())
    throw DomainError("profile support radius " + std::to_string(p.support_radius) +
                      " exceeds the grid extent " + std::to_string(grid.half_width()));
  if (p.kind == StationaryProfile::Kind::infinity)
    return normalize(DiscreteDensity::indicator(grid, -p.support_radius, p.support_radius));
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    v[i] = detail::cell_average(p, grid, i);
  return normalize(DiscreteDensity(grid, std::move(v)));
}

/// m may be +infinity.
inline std::pair<StationaryProfile, DiscreteDensity>
build_profile(const Confinement &v, double m, int d, const Grid &grid) {
  auto p = stationary_profile(v, m, d);
  auto rho = discretize(p, grid);
  return {std::move(p), std::move(rho)};
}

/// A*(d) = omega_d^{2/d} exp(-d int_0^1 log(1 - s^2) s^{d-1} ds): quadratic
/// confinements A|x|^2 with A above it have spt(rho_m) inside spt(rho_inf)
/// for large m.
inline double support_threshold(int d, double tol = 1e-13) {
  if (d < 1)
    throw DomainError("dimension must be >= 1");
  // s = 1 - w^2 moves the log singularity at s = 1 to a w log w zero at w = 0.
  auto integrand = [d](double w) {
    if (w <= 0.0)
      return 0.0;
    const double s = 1.0 - w * w;
    return (2.0 * std::log(w) + std::log(2.0 - w * w)) * std::pow(s, d - 1) * 2.0 * w;
  };
  const double integral = integrate_adaptive(integrand, 0.0, 1.0, tol);
  return std::pow(unit_ball_volume(d), 2.0 / d) * std::exp(-d * integral);
}

/// For V = A|x|^2 (Confinement::quadratic(2A)), whether sqrt(C_m / A) <= R_inf.
inline std::vector<bool> check_support_inclusion(const Confinement &v, int d,
                                                 const std::vector<double> &m_list) {
  if (v.kind() != Confinement::Kind::quadratic)
    throw ConfigError("support inclusion check needs a quadratic potential");
  const double limit_radius = limit_support_radius(d);
  std::vector<bool> out;
  out.reserve(m_list.size());
  for (double m : m_list)
    out.push_back(v.radius_at_level(solve_cm(v, m, d)) <= limit_radius + 1e-10);
  return out;
}

/// Finite-difference half width used by the d/dm diagnostics.
inline double dm_step(double m) { return std::max(1e-3, 1e-3 * m); }

/// || d/dm rho_m ||_{L^1} by a centred difference in m; the L^1 integral is
/// taken by adaptive quadrature on the analytic profiles.
inline double dm_density_l1(const Confinement &v, double m, int d) {
  const double dm = dm_step(m);
  if (!(m - dm > 1.0))
    throw DomainError("dm_density_l1 needs m - dm > 1");
  const double c_hi = solve_cm(v, m + dm, d);
  const double c_lo = solve_cm(v, m - dm, d);
  const double r_hi = v.radius_at_level(c_hi), r_lo = v.radius_at_level(c_lo);
  auto diff = [&](double r) {
    return std::abs(detail::profile_value(v, m + dm, c_hi, r) -
                    detail::profile_value(v, m - dm, c_lo, r)) /
           (2.0 * dm);
  };
  const double inner = std::min(r_hi, r_lo), outer = std::max(r_hi, r_lo);
  const double peak = std::max(detail::profile_value(v, m + dm, c_hi, 0.0),
                               detail::profile_value(v, m - dm, c_lo, 0.0));
  const double sup = peak / dm;
  double total = detail::radial_integral(v, d, inner, sup, diff);
  auto shell = [&](double r) { return diff(r) * detail::sphere_density(d, r); };
  total += integrate_to_singular_end(shell, inner, outer,
                                     sup * detail::sphere_density(d, outer), 1e-14, 1e-15);
  return total;
}

/// The centred-difference profile (rho_{m+dm} - rho_{m-dm}) / (2 dm) at cell
/// centres.
inline std::vector<double> dm_density_profile(const Confinement &v, double m, const Grid &grid) {
  const int d = grid.is_line() ? 1 : grid.dim();
  const double dm = dm_step(m);
  const double c_hi = solve_cm(v, m + dm, d);
  const double c_lo = solve_cm(v, m - dm, d);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = std::abs(grid.center(i));
    out[i] = (detail::profile_value(v, m + dm, c_hi, r) -
              detail::profile_value(v, m - dm, c_lo, r)) /
             (2.0 * dm);
  }
  return out;
}

} // namespace hslimit
