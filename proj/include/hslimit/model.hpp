#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"
#include "hslimit/potentials.hpp"
#include "hslimit/pressure.hpp"

namespace hslimit {

/// Everything that determines one evolution: pressure law, potentials, grid.
struct ModelSpec {
  PressureLaw pressure;
  PotentialSpec potentials;
  Grid grid;

  double contraction() const { return contraction_constant(potentials); }
};

/// (grad W * rho)(x_i) = sum_j grad W(x_i - x_j) rho_j h by direct quadrature.
/// O(N^2); kept as the reference for interaction_field.
inline std::vector<double> interaction_field_direct(const Interaction &w,
                                                    const DiscreteDensity &rho) {
  const Grid &g = rho.grid();
  std::vector<double> field(g.size(), 0.0);
  if (w.is_zero())
    return field;
  if (!g.is_line())
    throw ConfigError("interaction kernels are only supported on line grids");
  for (std::size_t i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      acc += w.gradient(g.center(i) - g.center(j)) * rho[j];
    field[i] = acc * g.h();
  }
  return field;
}

namespace detail {

/// Zeroth and first discrete moments, sum rho_j h and sum x_j rho_j h.
inline std::pair<double, double> line_moments(const Grid &g,
                                              std::span<const double> v,
                                              std::size_t lo, std::size_t hi) {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    m0 += v[j];
    m1 += g.center(j) * v[j];
  }
  return {m0 * g.h(), m1 * g.h()};
}

} // namespace detail

/// grad W * rho at the cell centres. For the quadratic kernel the direct sum
/// collapses to b (x_i M - X) with M, X the discrete mass and first moment.
inline std::vector<double> interaction_field(const Interaction &w,
                                             const DiscreteDensity &rho) {
  const Grid &g = rho.grid();
  if (w.is_zero())
    return std::vector<double>(g.size(), 0.0);
  if (!g.is_line())
    throw ConfigError("interaction kernels are only supported on line grids");
  const auto [m0, m1] = detail::line_moments(g, rho.values(), 0, g.size());
  std::vector<double> field(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    field[i] = w.stiffness() * (g.center(i) * m0 - m1);
  return field;
}

inline void check_admissible(const PressureLaw &law, const DiscreteDensity &rho) {
  if (!law.is_power() && !(max_density(rho) < 1.0))
    throw DomainError("singular pressure law needs max density < 1");
}

/// Free energy: internal energy + potential energy + half the interaction
/// energy. The singular-law internal energy density is -eps (r + ln(1-r)).
inline double energy(const ModelSpec &model, const DiscreteDensity &rho) {
  require_grid(model.grid, rho);
  check_admissible(model.pressure, rho);
  const Grid &g = model.grid;
  const Interaction &w = model.potentials.interaction;
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  if (!w.is_zero()) {
    if (!g.is_line())
      throw ConfigError("interaction kernels are only supported on line grids");
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = g.center(j);
      m0 += rho[j] * g.h();
      m1 += x * rho[j] * g.h();
      m2 += x * x * rho[j] * g.h();
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = rho[i];
    if (r == 0.0)
      continue;
    const double x = g.center(i);
    double e = model.pressure.internal_energy(r) + r * model.potentials.confinement.value(x);
    if (!w.is_zero())
      // W * rho (x) = (b/2)(x^2 M - 2 x X + S) for the quadratic kernel.
      e += 0.5 * r * 0.5 * w.stiffness() * (x * x * m0 - 2.0 * x * m1 + m2);
    total += e * g.cell_volume(i);
  }
  return total;
}

/// Selects which contributions enter the dissipation integrand.
struct DissipationTerms {
  bool pressure = true;
  bool confinement = true;
  bool interaction = true;
};

/// f = int rho |grad P(rho) + grad V + grad W * rho|^2.
///
/// grad P is a centred difference where both neighbours carry density above
/// 1e-12, one-sided where only one does, zero otherwise; cells at or below the
/// floor contribute nothing.
inline double dissipation(const ModelSpec &model, const DiscreteDensity &rho,
                          DissipationTerms terms = {}) {
  require_grid(model.grid, rho);
  check_admissible(model.pressure, rho);
  constexpr double floor = 1e-12;
  const Grid &g = model.grid;
  const std::size_t n = g.size();
  const double h = g.h();

  std::vector<double> p(n, 0.0);
  if (terms.pressure)
    for (std::size_t i = 0; i < n; ++i)
      p[i] = model.pressure.pressure_unchecked(rho[i]);
  std::vector<double> field(n, 0.0);
  if (terms.interaction)
    field = interaction_field(model.potentials.interaction, rho);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rho[i] > floor))
      continue;
    double grad_p = 0.0;
    if (terms.pressure) {
      // Radial cell 0 mirrors onto itself across r = 0.
      const bool mirrored = !g.is_line() && i == 0;
      const bool has_left = mirrored || (i > 0 && rho[i - 1] > floor);
      const bool has_right = i + 1 < n && rho[i + 1] > floor;
      const double left = mirrored ? p[0] : (i > 0 ? p[i - 1] : 0.0);
      const double right = i + 1 < n ? p[i + 1] : 0.0;
      if (has_left && has_right)
        grad_p = (right - left) / (2.0 * h);
      else if (has_right)
        grad_p = (right - p[i]) / h;
      else if (has_left)
        grad_p = (p[i] - left) / h;
    }
    const double v = grad_p +
                     (terms.confinement ? model.potentials.confinement.gradient(g.center(i)) : 0.0) +
                     field[i];
    total += rho[i] * v * v * g.cell_volume(i);
  }
  return total;
}

} // namespace hslimit
