// Acceptance criteria runner. `hslimit_acceptance <n>` runs criterion n,
// no argument runs all ten. One [PASS]/[FAIL] line per criterion; the exit
// status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hslimit/hslimit.hpp"

using namespace hslimit;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Confinement kHalfSquare = Confinement::quadratic(1.0); // V = x^2 / 2

const std::vector<double> kStationaryM{20, 40, 80, 160, 320, 640, 1280};

// Barenblatt solution of d_t rho = (rho^2)_xx with unit mass.
struct Barenblatt {
  double c = std::pow(3.0 / (4.0 * std::sqrt(12.0)), 2.0 / 3.0);

  double primitive(double x, double t) const {
    const double edge = std::sqrt(12.0 * c) * std::pow(t, 1.0 / 3.0);
    const double y = std::clamp(x, -edge, edge);
    const double s = std::pow(t, -1.0 / 3.0);
    return s * (c * y - y * y * y * s * s / 36.0);
  }

  DiscreteDensity cell_averages(const Grid &g, double t) const {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      v[i] = (primitive(g.face(i + 1), t) - primitive(g.face(i), t)) / g.h();
    return {g, std::move(v)};
  }
};

Outcome barenblatt() {
  constexpr double kMaxError = 1e-2;
  constexpr double kMinOrder = 0.8;
  const Barenblatt b;
  std::vector<double> errors;
  for (std::size_t n : {256u, 512u, 1024u}) {
    const Grid g = Grid::line(4.0, n);
    const ModelSpec model{PressureLaw::power(2.0), {}, g};
    const auto traj = solve(model, b.cell_averages(g, 1.0), {.final_time = 1.0});
    errors.push_back(lp_distance(traj.snapshots.back().density, b.cell_averages(g, 2.0), 1.0));
  }
  const double order = std::log2(errors[1] / errors[2]);
  return {errors[2] <= kMaxError && order >= kMinOrder,
          fmt("L1 error %.3e/%.3e/%.3e at N=256/512/1024, order %.3f (need <= %.0e, >= %.1f)",
              errors[0], errors[1], errors[2], order, kMaxError, kMinOrder)};
}

StationaryRateReport stationary_1d(StationaryMetric metric, ExpectedExponent expected) {
  return stationary_rate(kHalfSquare, 1, kStationaryM, metric, expected,
                         stationary_grid(kHalfSquare, 1, kStationaryM));
}

Outcome stationary_l1() {
  const auto r = stationary_1d(StationaryMetric::l1, {.lo = -1.15, .hi = -0.85, .min_r_squared = 0.99});
  return {r.report.verdict, fmt("exponent %.4f, r^2 %.5f (need [-1.15, -0.85], r^2 >= 0.99)",
                                r.report.fit.exponent, r.report.fit.r_squared)};
}

Outcome stationary_w2() {
  const auto r = stationary_1d(StationaryMetric::w2, {.hi = -0.45});
  return {r.report.verdict, fmt("exponent %.4f, r^2 %.5f (need <= -0.45)", r.report.fit.exponent,
                                r.report.fit.r_squared)};
}

Outcome stationary_w2_improved() {
  const auto v = Confinement::quadratic(20.0); // V = 10 |x|^2
  const auto r = stationary_rate(v, 2, kStationaryM, StationaryMetric::w2, {.hi = -0.6},
                                 stationary_grid(v, 2, kStationaryM));
  const auto inside = check_support_inclusion(v, 2, kStationaryM);
  const bool all_inside = std::all_of(inside.begin(), inside.end(), [](bool b) { return b; });
  return {r.report.verdict && all_inside && r.inclusion_on_whole_sweep,
          fmt("exponent %.4f, r^2 %.5f, support inclusion on all m: %s (need <= -0.6, true)",
              r.report.fit.exponent, r.report.fit.r_squared, all_inside ? "true" : "false")};
}

EvolutionFamily evolution_family(double final_time) {
  EvolutionFamily f;
  f.potentials = {kHalfSquare};
  f.grid = Grid::line(2.0, 512);
  f.final_time = final_time;
  f.snapshot_count = static_cast<std::size_t>(std::lround(20.0 * final_time)) + 1;
  return f;
}

Outcome evolution_power() {
  const auto family = evolution_family(2.0);
  const auto rho0 = DiscreteDensity::indicator(family.grid, -0.5, 0.5);
  const auto r = evolution_rate_power(family, rho0, {8, 16, 32, 64}, {.lo = -0.75, .hi = -0.40});
  std::string sweep;
  for (const auto &p : r.sweep)
    sweep += fmt(" %g:%.4e@t=%.2f", p.parameter, p.distance, p.time_of_max);
  return {r.verdict, fmt("exponent %.4f, r^2 %.5f (need [-0.75, -0.40]); sup W2 by m:", r.fit.exponent,
                         r.fit.r_squared) +
                         sweep};
}

Outcome global_in_time() {
  constexpr double kSlack = 1.10;
  const auto family = evolution_family(8.0);
  const auto rho0 = DiscreteDensity::indicator(family.grid, -0.5, 0.5);
  const auto cfg = family.solve_config();
  const auto a = solve(family.model(PressureLaw::power(16.0)), rho0, cfg);
  const auto b = solve(family.model(PressureLaw::power(31.0)), rho0, cfg);
  const auto series = distance_series(a, b);
  const double early = sup_distance(series, 2.0).first;
  const double late = sup_distance(series).first;
  return {late <= kSlack * early,
          fmt("sup W2 over [0,2] %.5e, over [0,8] %.5e, ratio %.4f (need <= %.2f)", early, late,
              late / early, kSlack)};
}

Outcome singular_rate() {
  const auto family = evolution_family(2.0);
  const auto rho0 = DiscreteDensity::indicator(family.grid, -5.0 / 9.0, 5.0 / 9.0, 0.9);
  const auto r = evolution_rate_singular(family, rho0, {0.2, 0.1, 0.05, 0.025}, {.lo = 0.35, .hi = 0.65});
  return {r.report.verdict && r.max_density < 1.0,
          fmt("exponent %.4f, r^2 %.5f, max density %.6f (need [0.35, 0.65], < 1)",
              r.report.fit.exponent, r.report.fit.r_squared, r.max_density)};
}

Outcome invariants() {
  constexpr double kMassTol = 1e-8;
  constexpr double kEnergySlack = 1e-6;
  constexpr double kBarycenterTol = 1e-6;
  constexpr double kGapTol = 1e-9;
  // The discrete flow contracts up to O(h) quantile and transport errors.
  constexpr double kContractionRel = 1e-2;
  constexpr double kContractionAbs = 1e-3;

  const Grid g = Grid::line(2.0, 1024);
  auto asymmetric = [&] {
    const auto a = DiscreteDensity::indicator(g, -0.9, -0.2, 1.0);
    const auto b = DiscreteDensity::indicator(g, 0.1, 0.4, 0.5);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      v[i] = a[i] + b[i];
    return normalize(DiscreteDensity(g, std::move(v)));
  }();

  double mass_drift = 0.0, energy_rise = -std::numeric_limits<double>::infinity();
  const std::vector<std::pair<ModelSpec, DiscreteDensity>> cases{
      {{PressureLaw::power(2.0), {kHalfSquare}, g}, asymmetric},
      {{PressureLaw::power(16.0), {kHalfSquare, Interaction::quadratic(0.5)}, g}, asymmetric},
      {{PressureLaw::singular(0.05), {kHalfSquare}, g},
       DiscreteDensity::indicator(g, -5.0 / 9.0, 5.0 / 9.0, 0.9)}};
  for (const auto &[model, rho0] : cases) {
    const auto traj = solve(model, rho0, {.final_time = 1.0, .snapshot_times = SolveConfig::equispaced(1.0, 51)});
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      const auto &d = traj.snapshots[k].diagnostics;
      mass_drift = std::max(mass_drift, std::abs(d.mass - mass(rho0)));
      if (k > 0)
        energy_rise = std::max(energy_rise, d.energy - traj.snapshots[k - 1].diagnostics.energy);
    }
  }

  const ModelSpec free{PressureLaw::power(4.0), {Confinement::zero(), Interaction::quadratic(1.0)}, g};
  const auto drift = solve(free, asymmetric, {.final_time = 1.0, .snapshot_times = SolveConfig::equispaced(1.0, 11)});
  double bar_drift = 0.0;
  for (const auto &s : drift.snapshots)
    bar_drift = std::max(bar_drift, std::abs(s.diagnostics.barycenter - barycenter(asymmetric)));

  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Grid coarse = Grid::line(2.0, 256);
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    auto draw = [&] {
      std::vector<double> v(coarse.size());
      for (auto &x : v)
        x = u(rng) < 0.4 ? 0.0 : u(rng);
      v[coarse.size() / 2] += 0.01;
      return normalize(DiscreteDensity(coarse, std::move(v)));
    };
    const auto a = draw(), b = draw();
    worst_gap = std::max(worst_gap, barycenter_gap(a, b) - wasserstein2(a, b));
  }

  const PotentialSpec convex{kHalfSquare};
  const ModelSpec pair_model{PressureLaw::power(3.0), convex, g};
  const double gamma = contraction_constant(convex);
  const SolveConfig pair_cfg{.final_time = 1.0, .snapshot_times = SolveConfig::equispaced(1.0, 11)};
  const auto a = solve(pair_model, asymmetric, pair_cfg);
  const auto b = solve(pair_model, DiscreteDensity::indicator(g, -0.3, 0.9), pair_cfg);
  const auto series = distance_series(a, b);
  double contraction_excess = -std::numeric_limits<double>::infinity();
  for (const auto &[t, w] : series)
    contraction_excess = std::max(
        contraction_excess,
        w - (std::exp(-gamma * t) * series.front().second * (1.0 + kContractionRel) + kContractionAbs));

  const bool ok = mass_drift <= kMassTol && energy_rise <= kEnergySlack &&
                  bar_drift <= kBarycenterTol && worst_gap <= kGapTol && contraction_excess <= 0.0;
  return {ok, fmt("mass drift %.2e (<= %.0e), max energy rise %.2e (<= %.0e), barycenter drift %.2e "
                  "(<= %.0e), max gap - W2 %.2e (<= %.0e), contraction excess %.2e (<= 0)",
                  mass_drift, kMassTol, energy_rise, kEnergySlack, bar_drift, kBarycenterTol,
                  worst_gap, kGapTol, contraction_excess)};
}

Outcome thresholds() {
  constexpr double kTol = 1e-5;
  const double a1 = support_threshold(1), a2 = support_threshold(2);
  const double e1 = std::exp(2.0), e2 = std::numbers::pi * std::exp(1.0);
  return {std::abs(a1 - e1) <= kTol && std::abs(a2 - e2) <= kTol,
          fmt("A*(1) = %.10f vs e^2 = %.10f, A*(2) = %.10f vs pi e = %.10f (tol %.0e)", a1, e1, a2,
              e2, kTol)};
}

Outcome dm_slope() {
  constexpr double kMaxSlope = -1.7;
  std::vector<std::pair<double, double>> pts;
  for (double m : {20.0, 40.0, 80.0, 160.0, 320.0, 640.0})
    pts.emplace_back(m, dm_density_l1(kHalfSquare, m, 1));
  const auto fit = fit_loglog(pts);
  return {fit.exponent <= kMaxSlope,
          fmt("slope %.4f, r^2 %.5f (need <= %.1f)", fit.exponent, fit.r_squared, kMaxSlope)};
}

struct Criterion {
  const char *name;
  std::function<Outcome()> run;
};

} // namespace

int main(int argc, char **argv) {
  const std::vector<Criterion> criteria{
      {"barenblatt oracle", barenblatt},
      {"stationary L1 rate", stationary_l1},
      {"stationary W2 rate", stationary_w2},
      {"improved stationary W2 rate", stationary_w2_improved},
      {"evolution pairwise rate", evolution_power},
      {"global-in-time boundedness", global_in_time},
      {"singular-law rate", singular_rate},
      {"structural invariants", invariants},
      {"threshold constants", thresholds},
      {"m-derivative diagnostic", dm_slope},
  };
  std::vector<std::size_t> selected;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(n - 1));
  } else {
    for (std::size_t i = 0; i < criteria.size(); ++i)
      selected.push_back(i);
  }

  bool all = true;
  for (std::size_t i : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception &e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %zu %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
