#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hslimit/error.hpp"
#include "hslimit/quadrature.hpp"

namespace hslimit {

enum class Geometry { line, radial };

/// Uniform cell-centred grid on [-L, L] (line) or on the radial segment
/// [0, L] of a radially symmetric field in R^d.
class Grid {
public:
  static Grid line(double half_width, std::size_t cells) {
    return Grid(Geometry::line, half_width, cells, 1);
  }
  static Grid radial(double radius, std::size_t cells, int dim) {
    return Grid(Geometry::radial, radius, cells, dim);
  }

  Geometry geometry() const noexcept { return geometry_; }
  bool is_line() const noexcept { return geometry_ == Geometry::line; }
  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return cells_; }
  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }

  double center(std::size_t i) const noexcept {
    if (is_line())
      return (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(cells_)) * h_;
    return (static_cast<double>(i) + 0.5) * h_;
  }
  /// Coordinate of face i, i in [0, N]; face i is the left face of cell i.
  double face(std::size_t i) const noexcept {
    if (is_line())
      return (static_cast<double>(i) - 0.5 * static_cast<double>(cells_)) * h_;
    return static_cast<double>(i) * h_;
  }
  /// Length (line) or d-dimensional shell volume (radial) of cell i.
  double cell_volume(std::size_t i) const noexcept {
    if (is_line())
      return h_;
    return omega_ * (std::pow(face(i + 1), dim_) - std::pow(face(i), dim_));
  }
  /// Measure of face i: 1 on the line, the sphere area d ω_d r^{d-1} radially.
  double face_area(std::size_t i) const noexcept {
    if (is_line())
      return 1.0;
    if (dim_ == 1)
      return 2.0;
    return omega_ * dim_ * std::pow(face(i), dim_ - 1);
  }

  bool operator==(const Grid &) const = default;

private:
  Grid(Geometry g, double half_width, std::size_t cells, int dim)
      : geometry_(g), half_width_(half_width), cells_(cells), dim_(dim) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw DomainError("grid half-width must be positive and finite");
    if (cells == 0)
      throw DomainError("grid needs at least one cell");
    if (dim < 1)
      throw DomainError("grid dimension must be >= 1");
    if (g == Geometry::line && dim != 1)
      throw DomainError("line geometry is one-dimensional");
    h_ = (g == Geometry::line ? 2.0 * half_width : half_width) /
         static_cast<double>(cells);
    omega_ = unit_ball_volume(dim);
  }

  Geometry geometry_;
  double half_width_;
  std::size_t cells_;
  int dim_;
  double h_ = 0.0;
  double omega_ = 0.0;
};

/// Nonnegative piecewise-constant density on a Grid. Immutable.
class DiscreteDensity {
public:
  DiscreteDensity(Grid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw GridMismatch("density has " + std::to_string(values_.size()) +
                         " values for a grid of " + std::to_string(grid_.size()) +
                         " cells");
    for (double v : values_)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError("density values must be finite and nonnegative");
  }

  /// Samples f at cell centres.
  static DiscreteDensity sample(const Grid &grid,
                                const std::function<double(double)> &f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      v[i] = f(grid.center(i));
    return {grid, std::move(v)};
  }

  /// height on [a, b] (line) or on the ball |x| < b (radial, a ignored), with
  /// partially covered cells receiving the exact cell average.
  static DiscreteDensity indicator(const Grid &grid, double a, double b,
                                   double height = 1.0) {
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double lo = grid.face(i);
      const double hi = grid.face(i + 1);
      if (grid.is_line()) {
        const double overlap = std::max(0.0, std::min(hi, b) - std::max(lo, a));
        v[i] = height * overlap / grid.h();
      } else {
        const int d = grid.dim();
        const double top = std::clamp(b, lo, hi);
        v[i] = height * (std::pow(top, d) - std::pow(lo, d)) /
               (std::pow(hi, d) - std::pow(lo, d));
      }
    }
    return {grid, std::move(v)};
  }

  const Grid &grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

private:
  Grid grid_;
  std::vector<double> values_;
};

inline double mass(const DiscreteDensity &rho) {
  const Grid &g = rho.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    total += rho[i] * g.cell_volume(i);
  return total;
}

inline double max_density(const DiscreteDensity &rho) {
  const auto v = rho.values();
  return *std::max_element(v.begin(), v.end());
}

/// Rescales to unit mass. Throws DomainError when the mass is below 1e-14.
inline DiscreteDensity normalize(const DiscreteDensity &rho) {
  const double total = mass(rho);
  if (!(total >= 1e-14))
    throw DomainError("cannot normalize a density of mass " + std::to_string(total));
  std::vector<double> v(rho.values().begin(), rho.values().end());
  for (double &x : v)
    x /= total;
  return {rho.grid(), std::move(v)};
}

inline double second_moment(const DiscreteDensity &rho) {
  const Grid &g = rho.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.center(i);
    total += x * x * rho[i] * g.cell_volume(i);
  }
  return total;
}

/// Centre of mass. Radial densities are symmetric, so their barycenter is 0.
inline double barycenter(const DiscreteDensity &rho) {
  const Grid &g = rho.grid();
  if (!g.is_line())
    return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    total += g.center(i) * rho[i] * g.h();
  return total;
}

inline void require_same_grid(const DiscreteDensity &a, const DiscreteDensity &b) {
  if (!(a.grid() == b.grid()))
    throw GridMismatch("densities live on different grids");
}

inline void require_grid(const Grid &g, const DiscreteDensity &rho) {
  if (!(rho.grid() == g))
    throw GridMismatch("density does not live on the model grid");
}

inline double lp_distance(const DiscreteDensity &a, const DiscreteDensity &b,
                          double p) {
  require_same_grid(a, b);
  if (!(p >= 1.0))
    throw DomainError("lp_distance needs p >= 1");
  const Grid &g = a.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    total += std::pow(std::abs(a[i] - b[i]), p) * g.cell_volume(i);
  return std::pow(total, 1.0 / p);
}

/// `x,value` header followed by one row per cell.
inline void write_csv(std::ostream &os, const DiscreteDensity &rho) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "x,value\n";
  for (std::size_t i = 0; i < rho.size(); ++i)
    os << rho.grid().center(i) << ',' << rho[i] << '\n';
  os.precision(old_precision);
}

} // namespace hslimit
