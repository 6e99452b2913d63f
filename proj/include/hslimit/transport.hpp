#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"

namespace hslimit {

/// Inverse CDF of a piecewise-constant density. `levels[k]` is the mass to the
/// left of (line) or inside (radial) face k, `positions[k]` the face
/// coordinate. Within a cell the line CDF is linear in x and the radial CDF
/// linear in r^d, which is what evaluate() inverts.
class QuantileFunction {
public:
  QuantileFunction(Geometry geometry, int dim, std::vector<double> levels,
                   std::vector<double> positions)
      : geometry_(geometry), dim_(dim), levels_(std::move(levels)),
        positions_(std::move(positions)) {}

  Geometry geometry() const noexcept { return geometry_; }
  int dim() const noexcept { return dim_; }
  const std::vector<double> &levels() const noexcept { return levels_; }
  const std::vector<double> &positions() const noexcept { return positions_; }

  /// F^{-1}(u) = inf{x : F(x) >= u} for u in [0, 1]; on flat CDF stretches
  /// (vacuum) this is the left end of the stretch.
  double operator()(double u) const {
    const auto it = std::lower_bound(levels_.begin(), levels_.end(), u);
    if (it == levels_.end())
      return last_charged_face();
    if (it == levels_.begin())
      return positions_.front();
    const std::size_t k = static_cast<std::size_t>(it - levels_.begin()) - 1;
    return within_cell(k, u);
  }

  /// Evaluates at an increasing sequence of mass levels in O(N + M).
  std::vector<double> evaluate_sorted(const std::vector<double> &us) const {
    std::vector<double> out(us.size());
    std::size_t k = 0;
    const std::size_t cells = levels_.size() - 1;
    for (std::size_t j = 0; j < us.size(); ++j) {
      const double u = us[j];
      if (!(u > levels_.front())) {
        out[j] = positions_.front();
        continue;
      }
      while (k < cells && levels_[k + 1] < u)
        ++k;
      out[j] = k < cells ? within_cell(k, u) : last_charged_face();
    }
    return out;
  }

private:
  double within_cell(std::size_t k, double u) const {
    const double frac = (u - levels_[k]) / (levels_[k + 1] - levels_[k]);
    const double a = positions_[k], b = positions_[k + 1];
    if (geometry_ == Geometry::line || dim_ == 1)
      return a + frac * (b - a);
    const double ad = std::pow(a, dim_), bd = std::pow(b, dim_);
    return std::pow(ad + frac * (bd - ad), 1.0 / dim_);
  }
  double last_charged_face() const {
    for (std::size_t k = levels_.size() - 1; k > 0; --k)
      if (levels_[k] > levels_[k - 1])
        return positions_[k];
    return positions_.back();
  }

  Geometry geometry_;
  int dim_;
  std::vector<double> levels_;
  std::vector<double> positions_;
};

inline QuantileFunction quantile_of(const DiscreteDensity &rho) {
  const Grid &g = rho.grid();
  const double total = mass(rho);
  if (!(total > 1e-14))
    throw DomainError("quantile of a zero-mass density");
  std::vector<double> levels(g.size() + 1), positions(g.size() + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k <= g.size(); ++k) {
    levels[k] = std::min(1.0, acc / total);
    positions[k] = g.face(k);
    if (k < g.size())
      acc += rho[k] * g.cell_volume(k);
  }
  levels.back() = 1.0;
  return {g.geometry(), g.dim(), std::move(levels), std::move(positions)};
}

/// Number of mass levels used by wasserstein2.
inline constexpr std::size_t kMassLevels = 4096;

/// W2 as the L2 distance of quantile functions, midpoint rule on
/// `levels` equispaced mass levels. Radial pairs use the radial quantile,
/// since the monotone radial rearrangement is optimal between radial measures.
inline double wasserstein2(const DiscreteDensity &a, const DiscreteDensity &b,
                           std::size_t levels = kMassLevels) {
  if (a.grid().geometry() != b.grid().geometry() || a.grid().dim() != b.grid().dim())
    throw GridMismatch("wasserstein2 needs densities of the same geometry and dimension");
  std::vector<double> us(levels);
  for (std::size_t j = 0; j < levels; ++j)
    us[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(levels);
  const auto qa = quantile_of(a).evaluate_sorted(us);
  const auto qb = quantile_of(b).evaluate_sorted(us);
  double total = 0.0;
  for (std::size_t j = 0; j < levels; ++j) {
    const double d = qa[j] - qb[j];
    total += d * d;
  }
  return std::sqrt(total / static_cast<double>(levels));
}

/// 1D homogeneous H^{-1} norm of the difference, the L2 distance of the CDFs.
/// CDFs are piecewise linear, so each cell is integrated exactly.
inline double h_minus_one(const DiscreteDensity &a, const DiscreteDensity &b) {
  require_same_grid(a, b);
  const Grid &g = a.grid();
  if (!g.is_line())
    throw GridMismatch("h_minus_one is implemented on line grids only");
  if (std::abs(mass(a) - mass(b)) > 1e-8)
    throw DomainError("H^-1 distance between densities of different mass is infinite");
  double total = 0.0;
  double diff_left = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double diff_right = diff_left + (a[i] - b[i]) * g.h();
    total += g.h() *
             (diff_left * diff_left + diff_left * diff_right + diff_right * diff_right) / 3.0;
    diff_left = diff_right;
  }
  return std::sqrt(total);
}

/// |bar(a) - bar(b)|; bounded by W2(a, b) by Cauchy-Schwarz on any plan.
inline double barycenter_gap(const DiscreteDensity &a, const DiscreteDensity &b) {
  if (!a.grid().is_line() || !b.grid().is_line())
    throw GridMismatch("barycenter_gap needs line densities");
  return std::abs(barycenter(a) - barycenter(b));
}

} // namespace hslimit
