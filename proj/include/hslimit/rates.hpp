#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"
#include "hslimit/model.hpp"
#include "hslimit/solver.hpp"
#include "hslimit/stationary.hpp"
#include "hslimit/transport.hpp"

namespace hslimit {

struct LogLogFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (log x, log y). Needs at least four points with
/// positive coordinates.
inline LogLogFit fit_loglog(const std::vector<std::pair<double, double>> &points) {
  if (points.size() < 4)
    throw DomainError("log-log fit needs at least 4 points, got " +
                      std::to_string(points.size()));
  double sx = 0.0, sy = 0.0;
  for (const auto &[x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0))
      throw DomainError("log-log fit needs positive data");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto &[x, y] : points) {
    const double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0))
    throw DomainError("log-log fit needs at least two distinct abscissae");
  LogLogFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  // Constant data is fitted exactly by the zero slope.
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

/// Accepted exponent interval; the rate theorems are one-sided, so usually
/// only one end is finite.
struct ExpectedExponent {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double min_r_squared = 0.0;

  bool accepts(const LogLogFit &fit) const {
    return fit.exponent >= lo && fit.exponent <= hi && fit.r_squared >= min_r_squared;
  }
};

struct SweepPoint {
  double parameter = 0.0;
  double distance = 0.0;
  /// Time of the sup for evolution sweeps; 0 for stationary sweeps.
  double time_of_max = 0.0;
  /// Partner parameter: 2m - 1 for power pairs, the reference epsilon for
  /// singular sweeps.
  double partner = 0.0;
  bool in_fit = true;
};

struct RateReport {
  std::string theorem_tag;
  std::string parameter_name;
  std::vector<SweepPoint> sweep;
  LogLogFit fit;
  ExpectedExponent expected;
  bool verdict = false;
  /// Exponent the theory predicts, when it names one.
  double predicted_exponent = std::numeric_limits<double>::quiet_NaN();
  bool within_hypotheses = true;
  std::vector<std::string> notes;

  void assemble() {
    std::sort(sweep.begin(), sweep.end(),
              [](const SweepPoint &a, const SweepPoint &b) { return a.parameter < b.parameter; });
    std::vector<std::pair<double, double>> pts;
    for (const auto &p : sweep)
      if (p.in_fit)
        pts.emplace_back(p.parameter, p.distance);
    fit = fit_loglog(pts);
    verdict = expected.accepts(fit);
  }
};

/// Runs fn(0..n-1) on up to `jobs` threads; results come back in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned jobs, const std::function<T(std::size_t)> &fn) {
  std::vector<T> out;
  out.reserve(n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<T>> pending;
  std::size_t next = 0;
  while (out.size() < n) {
    while (next < n && pending.size() < jobs)
      pending.push_back(std::async(std::launch::async, fn, next++));
    out.push_back(pending.front().get());
    pending.erase(pending.begin());
  }
  return out;
}

/// Everything but the pressure law of an evolution sweep.
struct EvolutionFamily {
  PotentialSpec potentials;
  Grid grid = Grid::line(2.0, 512);
  double final_time = 2.0;
  std::size_t snapshot_count = 41;
  double cfl_safety = 0.45;

  ModelSpec model(PressureLaw law) const { return {law, potentials, grid}; }
  SolveConfig solve_config() const {
    SolveConfig cfg;
    cfg.final_time = final_time;
    cfg.cfl_safety = cfl_safety;
    cfg.snapshot_times = SolveConfig::equispaced(final_time, snapshot_count);
    return cfg;
  }
};

/// W2 between two trajectories at each shared snapshot time.
inline std::vector<std::pair<double, double>> distance_series(const Trajectory &a,
                                                              const Trajectory &b) {
  if (a.snapshots.size() != b.snapshots.size())
    throw GridMismatch("trajectories have different snapshot sets");
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    if (a.snapshots[k].time != b.snapshots[k].time)
      throw GridMismatch("trajectories have different snapshot times");
    out.emplace_back(a.snapshots[k].time,
                     wasserstein2(a.snapshots[k].density, b.snapshots[k].density));
  }
  return out;
}

/// (sup distance, time of the sup) over snapshots with time <= t_max.
inline std::pair<double, double> sup_distance(const std::vector<std::pair<double, double>> &series,
                                              double t_max = std::numeric_limits<double>::infinity()) {
  double best = 0.0, at = 0.0;
  for (const auto &[t, d] : series)
    if (t <= t_max && d > best) {
      best = d;
      at = t;
    }
  return {best, at};
}

inline double max_density_over(const Trajectory &traj) {
  double out = 0.0;
  for (const auto &s : traj.snapshots)
    out = std::max(out, s.diagnostics.max_density);
  return out;
}

/// Power-law evolution rate through the pairing m <-> 2m - 1: the sup-in-time
/// W2 distance between the two solutions started from the same data, fitted
/// against m. A pair with equal exponents is kept in the table but left out of
/// the fit.
inline RateReport evolution_rate_power_pairs(const EvolutionFamily &family,
                                             const DiscreteDensity &rho0,
                                             const std::vector<std::pair<double, double>> &pairs,
                                             ExpectedExponent expected = {.hi = -0.4},
                                             unsigned jobs = 1) {
  RateReport report;
  report.theorem_tag = "evolution_w2_power";
  report.parameter_name = "m";
  report.expected = expected;
  report.predicted_exponent = -0.5;
  report.within_hypotheses = family.potentials.confinement.hessian_lower() > 0.0 ||
                             contraction_constant(family.potentials) > 0.0;
  if (!report.within_hypotheses)
    report.notes.push_back("outside theorem hypotheses: contraction constant is not positive");

  const SolveConfig cfg = family.solve_config();
  auto points = parallel_map<SweepPoint>(pairs.size(), jobs, [&](std::size_t i) {
    const auto [m1, m2] = pairs[i];
    SweepPoint p;
    p.parameter = m1;
    p.partner = m2;
    if (m1 == m2) {
      p.in_fit = false;
      return p;
    }
    try {
      const auto a = solve(family.model(PressureLaw::power(m1)), rho0, cfg);
      const auto b = solve(family.model(PressureLaw::power(m2)), rho0, cfg);
      std::tie(p.distance, p.time_of_max) = sup_distance(distance_series(a, b));
    } catch (const Error &e) {
      throw Error("m = " + std::to_string(m1) + ": " + e.what());
    }
    return p;
  });
  for (const auto &p : points)
    if (!p.in_fit)
      report.notes.push_back("pair (" + std::to_string(p.parameter) + ", " +
                             std::to_string(p.partner) +
                             ") has identical exponents; excluded from the fit");
  report.sweep = std::move(points);
  report.assemble();
  return report;
}

inline RateReport evolution_rate_power(const EvolutionFamily &family, const DiscreteDensity &rho0,
                                       const std::vector<double> &m_list,
                                       ExpectedExponent expected = {.hi = -0.4},
                                       unsigned jobs = 1) {
  std::vector<std::pair<double, double>> pairs;
  for (double m : m_list)
    pairs.emplace_back(m, 2.0 * m - 1.0);
  return evolution_rate_power_pairs(family, rho0, pairs, expected, jobs);
}

struct SingularRateReport {
  RateReport report;
  double max_density = 0.0;
};

/// Singular-law rate: sup-in-time W2 between rho_eps and the solution at the
/// reference eps' = min(eps_list) / 16, fitted against eps.
inline SingularRateReport evolution_rate_singular(const EvolutionFamily &family,
                                                  const DiscreteDensity &rho0,
                                                  const std::vector<double> &eps_list,
                                                  ExpectedExponent expected = {.lo = 0.4},
                                                  unsigned jobs = 1) {
  if (eps_list.empty())
    throw ConfigError("eps_list is empty");
  if (!(max_density(rho0) < 1.0))
    throw DomainError("singular-law sweep needs max initial density < 1");
  SingularRateReport out;
  RateReport &report = out.report;
  report.theorem_tag = "evolution_w2_singular";
  report.parameter_name = "epsilon";
  report.expected = expected;
  report.predicted_exponent = 0.5;
  const double eps_ref = *std::min_element(eps_list.begin(), eps_list.end()) / 16.0;
  const SolveConfig cfg = family.solve_config();

  // Index eps_list.size() is the reference run.
  auto runs = parallel_map<Trajectory>(eps_list.size() + 1, jobs, [&](std::size_t i) {
    const double eps = i < eps_list.size() ? eps_list[i] : eps_ref;
    try {
      return solve(family.model(PressureLaw::singular(eps)), rho0, cfg);
    } catch (const Error &e) {
      throw Error("epsilon = " + std::to_string(eps) + ": " + e.what());
    }
  });
  const Trajectory &reference = runs.back();
  out.max_density = max_density_over(reference);
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    SweepPoint p;
    p.parameter = eps_list[i];
    p.partner = eps_ref;
    std::tie(p.distance, p.time_of_max) = sup_distance(distance_series(runs[i], reference));
    out.max_density = std::max(out.max_density, max_density_over(runs[i]));
    report.sweep.push_back(p);
  }
  report.assemble();
  return out;
}

enum class StationaryMetric { l1, w2 };

struct StationaryRow {
  double m = 0.0;
  double constant = 0.0;
  double support_radius = 0.0;
  double l1_distance = 0.0;
  double w2_distance = 0.0;
  double dm_l1 = 0.0;
  bool inside_limit_support = false;
};

/// Default grid for stationary sweeps: 4x the limit support radius, or the
/// widest finite-m support if larger.
inline Grid stationary_grid(const Confinement &v, int d, const std::vector<double> &m_list,
                            std::size_t cells = 1u << 15) {
  double radius = limit_support_radius(d);
  for (double m : m_list)
    radius = std::max(radius, v.radius_at_level(solve_cm(v, m, d)));
  const double l = 4.0 * limit_support_radius(d) > 1.25 * radius ? 4.0 * limit_support_radius(d)
                                                                  : 2.0 * radius;
  return d == 1 ? Grid::line(l, cells) : Grid::radial(l, cells, d);
}

inline std::vector<StationaryRow> stationary_sweep(const Confinement &v, int d,
                                                   const std::vector<double> &m_list,
                                                   const Grid &grid, bool with_dm = true,
                                                   unsigned jobs = 1) {
  const auto limit = build_profile(v, std::numeric_limits<double>::infinity(), d, grid);
  const double limit_radius = limit.first.support_radius;
  return parallel_map<StationaryRow>(m_list.size(), jobs, [&](std::size_t i) {
    const double m = m_list[i];
    const auto [profile, rho] = build_profile(v, m, d, grid);
    StationaryRow row;
    row.m = m;
    row.constant = profile.constant;
    row.support_radius = profile.support_radius;
    row.l1_distance = lp_distance(rho, limit.second, 1.0);
    row.w2_distance = wasserstein2(rho, limit.second);
    row.dm_l1 = with_dm ? dm_density_l1(v, m, d) : 0.0;
    row.inside_limit_support = profile.support_radius <= limit_radius + 1e-10;
    return row;
  });
}

/// Exponent 1/(2(1 - kappa)), kappa = (d+q)/(q(d+2)), of the improved W2 rate.
inline double improved_w2_exponent(int d, double q) {
  const double kappa = (d + q) / (q * (d + 2.0));
  return 1.0 / (2.0 * (1.0 - kappa));
}

struct StationaryRateReport {
  RateReport report;
  std::vector<StationaryRow> rows;
  bool inclusion_on_whole_sweep = false;
  /// First m of the sweep from which support inclusion holds; NaN if never.
  double inclusion_onset = std::numeric_limits<double>::quiet_NaN();
};

inline StationaryRateReport stationary_rate(const Confinement &v, int d,
                                            const std::vector<double> &m_list,
                                            StationaryMetric metric, ExpectedExponent expected,
                                            const Grid &grid, unsigned jobs = 1, double q = 0.0) {
  StationaryRateReport out;
  if (m_list.size() < 4)
    throw DomainError("stationary_rate needs at least 4 values of m");
  out.rows = stationary_sweep(v, d, m_list, grid, true, jobs);
  std::sort(out.rows.begin(), out.rows.end(),
            [](const StationaryRow &a, const StationaryRow &b) { return a.m < b.m; });
  RateReport &report = out.report;
  report.parameter_name = "m";
  report.expected = expected;
  report.within_hypotheses = v.hessian_lower() > 0.0;
  if (!report.within_hypotheses)
    report.notes.push_back("outside theorem hypotheses: confinement is not strictly convex");
  out.inclusion_on_whole_sweep = true;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto &row = out.rows[i];
    out.inclusion_on_whole_sweep = out.inclusion_on_whole_sweep && row.inside_limit_support;
    bool holds_from_here = true;
    for (std::size_t j = i; j < out.rows.size(); ++j)
      holds_from_here = holds_from_here && out.rows[j].inside_limit_support;
    if (holds_from_here && std::isnan(out.inclusion_onset))
      out.inclusion_onset = row.m;
    SweepPoint p;
    p.parameter = row.m;
    p.distance = metric == StationaryMetric::l1 ? row.l1_distance : row.w2_distance;
    report.sweep.push_back(p);
  }
  if (metric == StationaryMetric::l1) {
    report.theorem_tag = "stationary_l1";
    report.predicted_exponent = -1.0;
  } else if (out.inclusion_on_whole_sweep && v.kind() == Confinement::Kind::quadratic) {
    report.theorem_tag = "stationary_w2_improved";
    report.predicted_exponent = -improved_w2_exponent(d, q > d ? q : 2.0 * d);
  } else {
    report.theorem_tag = "stationary_w2";
    report.predicted_exponent = -0.5;
  }
  report.assemble();
  return out;
}

/// FNV-1a, used to fingerprint configurations in summaries.
inline std::string config_hash(const std::string &canonical) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline void write_sweep_csv(std::ostream &os, const RateReport &r) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << r.parameter_name << ",partner,distance,time_of_max,in_fit\n";
  for (const auto &p : r.sweep)
    os << p.parameter << ',' << p.partner << ',' << p.distance << ',' << p.time_of_max << ','
       << (p.in_fit ? 1 : 0) << '\n';
  os.precision(old);
}

inline void write_stationary_csv(std::ostream &os, const std::vector<StationaryRow> &rows) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "m,C_m,support_radius,l1_distance,w2_distance,dm_l1\n";
  for (const auto &r : rows)
    os << r.m << ',' << r.constant << ',' << r.support_radius << ',' << r.l1_distance << ','
       << r.w2_distance << ',' << r.dm_l1 << '\n';
  os.precision(old);
}

inline nlohmann::json summary_json(const RateReport &r, const std::string &hash) {
  nlohmann::json j;
  j["theorem_tag"] = r.theorem_tag;
  j["exponent"] = r.fit.exponent;
  j["intercept"] = r.fit.intercept;
  j["r_squared"] = r.fit.r_squared;
  j["verdict"] = r.verdict ? "pass" : "fail";
  j["config_hash"] = hash;
  j["within_hypotheses"] = r.within_hypotheses;
  if (!std::isnan(r.predicted_exponent))
    j["predicted_exponent"] = r.predicted_exponent;
  auto bound = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
  j["expected"] = {{"lo", bound(r.expected.lo)},
                   {"hi", bound(r.expected.hi)},
                   {"min_r_squared", r.expected.min_r_squared}};
  if (!r.notes.empty())
    j["notes"] = r.notes;
  return j;
}

} // namespace hslimit
