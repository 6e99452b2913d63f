#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hslimit/config.hpp"
#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"
#include "hslimit/model.hpp"
#include "hslimit/rates.hpp"
#include "hslimit/solver.hpp"
#include "hslimit/stationary.hpp"
#include "hslimit/transport.hpp"

#ifndef HSLIMIT_VERSION
#define HSLIMIT_VERSION "1.0.0"
#endif

namespace hslimit {

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_config = 2 };

struct SelfCheck {
  std::string name;
  bool passed;
};

/// Quick structural checks with exact or symmetry-derived answers.
inline std::vector<SelfCheck> self_test_checks() {
  std::vector<SelfCheck> out;
  auto check = [&](std::string name, const std::function<bool()> &fn) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception &) {
      ok = false;
    }
    out.push_back({std::move(name), ok});
  };
  auto raises = [](const std::function<void()> &fn) {
    try {
      fn();
    } catch (const Error &) {
      return true;
    }
    return false;
  };
  const Grid line = Grid::line(2.0, 400);
  const auto box = DiscreteDensity::indicator(line, -0.5, 0.5);
  const auto unit_a = DiscreteDensity::indicator(line, 0.0, 1.0);
  const auto unit_b = DiscreteDensity::indicator(line, 1.0, 2.0);

  check("zero density has zero mass",
        [&] { return mass(DiscreteDensity(line, std::vector<double>(line.size()))) == 0.0; });
  check("box density has unit mass", [&] { return std::abs(mass(box) - 1.0) < 1e-10; });
  check("pressure vanishes at zero density", [] {
    return PressureLaw::power(3.0).pressure(0.0) == 0.0 &&
           PressureLaw::singular(0.1).pressure(0.0) == 0.0;
  });
  check("congestion potential vanishes at zero", [] { return congestion_potential(0.0) == 0.0; });
  check("zero kernel gives zero interaction field", [&] {
    for (double f : interaction_field(Interaction::zero(), box))
      if (f != 0.0)
        return false;
    return true;
  });
  check("W2 of a density with itself is zero", [&] { return wasserstein2(box, box) == 0.0; });
  check("W2 of a unit translation is one",
        [&] { return std::abs(wasserstein2(unit_a, unit_b) - 1.0) < 1e-3; });
  check("H^-1 of a density with itself is zero", [&] { return h_minus_one(box, box) == 0.0; });
  check("barycenter gap of identical densities is zero",
        [&] { return barycenter_gap(box, box) == 0.0; });
  check("log-log fit recovers an exact power law", [] {
    const auto f = fit_loglog({{10, 0.1}, {100, 0.01}, {1000, 0.001}, {10000, 0.0001}});
    return std::abs(f.exponent + 1.0) < 1e-12 && std::abs(f.r_squared - 1.0) < 1e-12;
  });
  check("log-log fit of constant data has zero slope", [] {
    return std::abs(fit_loglog({{1, 2}, {2, 2}, {4, 2}, {8, 2}}).exponent) < 1e-14;
  });
  check("log-log fit rejects fewer than four points",
        [&] { return raises([] { fit_loglog({{1, 1}, {2, 2}}); }); });
  check("zero final time yields the initial snapshot only", [&] {
    const ModelSpec model{PressureLaw::power(2.0), {Confinement::quadratic(1.0)}, line};
    SolveConfig cfg;
    cfg.final_time = 0.0;
    const auto traj = solve(model, box, cfg);
    return traj.snapshots.size() == 1 && traj.snapshots[0].time == 0.0;
  });
  check("diffusive time step scales with h^2", [] {
    auto dt_for = [](std::size_t n) {
      const Grid g = Grid::line(2.0, n);
      const auto rho = DiscreteDensity::indicator(g, -1.0, 1.0, 1.0);
      return stable_dt({PressureLaw::power(2.0), {}, g}, rho, {0.5, 1e9});
    };
    return std::abs(dt_for(100) / dt_for(200) - 4.0) < 1e-9;
  });
  check("stationary profile vanishes outside its support", [] {
    const Grid g = Grid::line(2.0, 256);
    const auto [profile, rho] = build_profile(Confinement::quadratic(1.0), 4.0, 1, g);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (std::abs(g.center(i)) - 0.5 * g.h() > profile.support_radius && rho[i] != 0.0)
        return false;
    return true;
  });
  check("singular pressure rejects congested density",
        [&] { return raises([] { PressureLaw::singular(0.1).pressure(1.0); }); });
  return out;
}

namespace detail {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_json(const std::filesystem::path &path, const nlohmann::json &j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

inline void write_manifest(const RunConfig &cfg) {
  nlohmann::json j;
  j["tool"] = "hslimit";
  j["version"] = HSLIMIT_VERSION;
  j["command"] = command_name(cfg.command);
  j["inputs"] = cfg.values;
  j["jobs"] = cfg.jobs;
  j["output_dir"] = cfg.output_dir.string();
  j["config_hash"] = config_hash(cfg.canonical());
  j["created_utc"] = utc_timestamp();
  write_json(cfg.output_dir / "manifest.json", j);
}

inline void print_report(std::ostream &os, const RateReport &r) {
  os << r.theorem_tag << ": exponent " << r.fit.exponent << " (r^2 " << r.fit.r_squared
     << ") -> " << (r.verdict ? "pass" : "fail") << '\n';
  for (const auto &note : r.notes)
    os << "  note: " << note << '\n';
}

} // namespace detail

/// Executes one command, writing artifacts under cfg.output_dir. Returns 0 when
/// every verdict passes, 1 on a failed verdict or run, 2 on configuration
/// errors.
inline int run(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  try {
    validate(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    detail::write_manifest(cfg);
    const std::string hash = config_hash(cfg.canonical());
    out.precision(10);

    switch (cfg.command) {
    case Command::threshold: {
      const int d = dimension_of(cfg);
      const double a = support_threshold(d);
      out << "A*(" << d << ") = " << std::setprecision(10) << a << '\n';
      detail::write_json(cfg.output_dir / "summary.json",
                         {{"theorem_tag", "support_threshold"},
                          {"d", d},
                          {"threshold", a},
                          {"verdict", "pass"},
                          {"config_hash", hash}});
      return exit_pass;
    }
    case Command::self_test: {
      bool all = true;
      nlohmann::json checks = nlohmann::json::array();
      for (const auto &c : self_test_checks()) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << '\n';
        all = all && c.passed;
        checks.push_back({{"name", c.name}, {"passed", c.passed}});
      }
      detail::write_json(cfg.output_dir / "summary.json",
                         {{"theorem_tag", "self_test"},
                          {"checks", checks},
                          {"verdict", all ? "pass" : "fail"},
                          {"config_hash", hash}});
      return all ? exit_pass : exit_fail;
    }
    case Command::simulate: {
      const ModelSpec model = model_of(cfg);
      const auto rho0 = initial_of(cfg, model.grid);
      const EvolutionFamily family = family_of(cfg);
      const auto traj = solve(model, rho0, family.solve_config());
      write_trajectory(cfg.output_dir / "trajectory", traj);
      const auto &last = traj.snapshots.back().diagnostics;
      const bool ok = std::abs(last.mass - 1.0) <= 1e-8;
      out << "simulated to t = " << traj.snapshots.back().time << " in " << traj.steps
          << " steps; mass " << last.mass << ", energy " << last.energy << '\n';
      detail::write_json(cfg.output_dir / "summary.json",
                         {{"theorem_tag", "simulate"},
                          {"steps", traj.steps},
                          {"final_mass", last.mass},
                          {"final_energy", last.energy},
                          {"max_density", max_density_over(traj)},
                          {"verdict", ok ? "pass" : "fail"},
                          {"config_hash", hash}});
      return ok ? exit_pass : exit_fail;
    }
    case Command::rates_evolution: {
      const auto family = family_of(cfg);
      const auto rho0 = initial_of(cfg, family.grid);
      const auto report =
          evolution_rate_power(family, rho0, cfg.list("m_list", {8, 16, 32, 64}),
                               expected_of(cfg, {.hi = -0.4}), cfg.jobs);
      std::ofstream csv(cfg.output_dir / "sweep.csv");
      write_sweep_csv(csv, report);
      detail::write_json(cfg.output_dir / "summary.json", summary_json(report, hash));
      detail::print_report(out, report);
      return report.verdict ? exit_pass : exit_fail;
    }
    case Command::rates_singular: {
      const auto family = family_of(cfg);
      const auto rho0 = initial_of(cfg, family.grid);
      const auto result =
          evolution_rate_singular(family, rho0, cfg.list("eps_list", {0.2, 0.1, 0.05, 0.025}),
                                  expected_of(cfg, {.lo = 0.4}), cfg.jobs);
      std::ofstream csv(cfg.output_dir / "sweep.csv");
      write_sweep_csv(csv, result.report);
      auto summary = summary_json(result.report, hash);
      summary["max_density"] = result.max_density;
      const bool ok = result.report.verdict && result.max_density < 1.0;
      summary["verdict"] = ok ? "pass" : "fail";
      detail::write_json(cfg.output_dir / "summary.json", summary);
      detail::print_report(out, result.report);
      out << "max density over all runs: " << result.max_density << '\n';
      return ok ? exit_pass : exit_fail;
    }
    case Command::rates_stationary: {
      const Confinement v = parse_confinement(cfg.text("V", "quadratic:1"));
      const int d = dimension_of(cfg);
      const auto m_list = cfg.list("m_list", {20, 40, 80, 160, 320, 640, 1280});
      const auto metric =
          cfg.text("metric", "L1") == "W2" ? StationaryMetric::w2 : StationaryMetric::l1;
      Grid grid = stationary_grid(v, d, m_list,
                                  static_cast<std::size_t>(cfg.real("N", 1u << 15)));
      if (cfg.has("L"))
        grid = d == 1 ? Grid::line(cfg.real("L", 2.0), grid.size())
                      : Grid::radial(cfg.real("L", 2.0), grid.size(), d);
      const ExpectedExponent fallback =
          metric == StationaryMetric::l1 ? ExpectedExponent{.hi = -0.85}
                                         : ExpectedExponent{.hi = -0.4};
      const auto result = stationary_rate(v, d, m_list, metric, expected_of(cfg, fallback), grid,
                                          cfg.jobs, cfg.real("q", 0.0));
      std::ofstream csv(cfg.output_dir / "sweep.csv");
      write_stationary_csv(csv, result.rows);
      auto summary = summary_json(result.report, hash);
      summary["support_inclusion_on_sweep"] = result.inclusion_on_whole_sweep;
      if (!std::isnan(result.inclusion_onset))
        summary["support_inclusion_onset_m"] = result.inclusion_onset;
      detail::write_json(cfg.output_dir / "summary.json", summary);
      detail::print_report(out, result.report);
      return result.report.verdict ? exit_pass : exit_fail;
    }
    }
  } catch (const ConfigError &e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const Error &e) {
    err << "run failed: " << e.what() << '\n';
    return exit_fail;
  }
  return exit_fail;
}

} // namespace hslimit
