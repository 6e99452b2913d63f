#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"
#include "hslimit/model.hpp"
#include "hslimit/parse.hpp"
#include "hslimit/potentials.hpp"
#include "hslimit/pressure.hpp"
#include "hslimit/rates.hpp"

namespace hslimit {

enum class Command { simulate, rates_evolution, rates_singular, rates_stationary, threshold, self_test };

inline Command parse_command(const std::string &name) {
  static const std::map<std::string, Command> names = {
      {"simulate", Command::simulate},
      {"rates-evolution", Command::rates_evolution},
      {"rates-singular", Command::rates_singular},
      {"rates-stationary", Command::rates_stationary},
      {"threshold", Command::threshold},
      {"self-test", Command::self_test}};
  const auto it = names.find(name);
  if (it == names.end())
    throw ConfigError("unknown command '" + name + "'");
  return it->second;
}

inline std::string command_name(Command c) {
  switch (c) {
  case Command::simulate: return "simulate";
  case Command::rates_evolution: return "rates-evolution";
  case Command::rates_singular: return "rates-singular";
  case Command::rates_stationary: return "rates-stationary";
  case Command::threshold: return "threshold";
  case Command::self_test: return "self-test";
  }
  return "";
}

/// Keys accepted in config files and as positional overrides.
inline const std::set<std::string> &known_keys() {
  static const std::set<std::string> keys = {
      // model
      "pressure", "m", "epsilon", "V", "W", "L", "N", "d",
      // run
      "T", "snapshots", "cfl", "initial", "m_list", "eps_list", "metric", "expect",
      "min_r2", "q"};
  return keys;
}

/// Parsed experiment configuration. Values are kept as text in `values`
/// (later assignments win) and interpreted on demand.
struct RunConfig {
  Command command = Command::self_test;
  std::map<std::string, std::string> values;
  std::filesystem::path output_dir = "hslimit-out";
  unsigned jobs = 1;

  bool has(const std::string &key) const { return values.count(key) != 0; }
  std::string text(const std::string &key, const std::string &fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
  double real(const std::string &key, double fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : parse_real(it->second);
  }
  std::vector<double> list(const std::string &key, std::vector<double> fallback) const {
    const auto it = values.find(key);
    return it == values.end() ? fallback : parse_real_list(it->second);
  }

  /// key=value lines sorted by key; the input of the config hash.
  std::string canonical() const {
    std::string out = "command=" + command_name(command) + "\n";
    for (const auto &[k, v] : values)
      out += k + "=" + v + "\n";
    return out;
  }
};

/// Parse error carrying the 1-based line number and the offending line.
class ConfigLineError : public ConfigError {
public:
  ConfigLineError(std::size_t line, const std::string &content, const std::string &why)
      : ConfigError("line " + std::to_string(line) + ": " + why + ": " + content), line_(line),
        content_(content) {}
  std::size_t line() const noexcept { return line_; }
  const std::string &content() const noexcept { return content_; }

private:
  std::size_t line_;
  std::string content_;
};

/// Applies one `key=value` assignment; `line` is used for error reports.
inline void assign(RunConfig &cfg, const std::string &raw, std::size_t line) {
  const auto eq = raw.find('=');
  if (eq == std::string::npos)
    throw ConfigLineError(line, raw, "expected key=value");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  const std::string key = trim(raw.substr(0, eq));
  const std::string value = trim(raw.substr(eq + 1));
  if (key.empty())
    throw ConfigLineError(line, raw, "empty key");
  if (!known_keys().count(key))
    throw ConfigLineError(line, raw, "unknown key '" + key + "'");
  cfg.values[key] = value;
}

/// key=value lines; `#` starts a comment; blank lines are ignored.
inline RunConfig parse_config(const std::string &text, RunConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    assign(base, line, number);
  }
  return base;
}

/// Cross-key checks and numeric validation. Throws ConfigError.
inline void validate(const RunConfig &cfg) {
  const std::string pressure = cfg.text("pressure", "power");
  if (pressure != "power" && pressure != "singular")
    throw ConfigError("pressure must be power or singular, got '" + pressure + "'");
  if (pressure == "power" && cfg.has("epsilon"))
    throw ConfigError("pressure=power is inconsistent with epsilon");
  if (pressure == "singular" && cfg.has("m"))
    throw ConfigError("pressure=singular is inconsistent with m");
  if (cfg.command == Command::rates_singular && cfg.has("m"))
    throw ConfigError("rates-singular takes eps_list, not m");
  for (const char *key : {"m", "epsilon", "L", "N", "d", "T", "snapshots", "cfl", "min_r2", "q"})
    if (cfg.has(key))
      (void)cfg.real(key, 0.0);
  if (cfg.has("m") && !(cfg.real("m", 2.0) > 1.0))
    throw ConfigError("m must be > 1");
  if (cfg.has("epsilon") && !(cfg.real("epsilon", 1.0) > 0.0))
    throw ConfigError("epsilon must be > 0");
  for (double m : cfg.list("m_list", {}))
    if (!(m > 1.0))
      throw ConfigError("m_list values must be > 1");
  for (double e : cfg.list("eps_list", {}))
    if (!(e > 0.0))
      throw ConfigError("eps_list values must be > 0");
  const double n = cfg.real("N", 512);
  if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::size_t>(n)))
    throw ConfigError("N must be a positive integer");
  const double d = cfg.real("d", 1);
  if (!(d >= 1.0) || d != static_cast<double>(static_cast<int>(d)))
    throw ConfigError("d must be a positive integer");
  if (!(cfg.real("L", 2.0) > 0.0))
    throw ConfigError("L must be > 0");
  if (cfg.has("expect") && cfg.list("expect", {}).size() != 2)
    throw ConfigError("expect takes two comma-separated bounds lo,hi");
  const std::string metric = cfg.text("metric", "L1");
  if (metric != "L1" && metric != "W2")
    throw ConfigError("metric must be L1 or W2");
  (void)parse_confinement(cfg.text("V", "quadratic:1"));
  (void)parse_interaction(cfg.text("W", "zero"));
}

inline int dimension_of(const RunConfig &cfg) { return static_cast<int>(cfg.real("d", 1)); }

inline Grid grid_of(const RunConfig &cfg) {
  const double l = cfg.real("L", 2.0);
  const auto n = static_cast<std::size_t>(cfg.real("N", 512));
  const int d = dimension_of(cfg);
  return d == 1 ? Grid::line(l, n) : Grid::radial(l, n, d);
}

inline PotentialSpec potentials_of(const RunConfig &cfg) {
  return {parse_confinement(cfg.text("V", "quadratic:1")),
          parse_interaction(cfg.text("W", "zero"))};
}

inline PressureLaw pressure_of(const RunConfig &cfg) {
  if (cfg.text("pressure", "power") == "singular")
    return PressureLaw::singular(cfg.real("epsilon", 0.01));
  return PressureLaw::power(cfg.real("m", 2.0));
}

inline ModelSpec model_of(const RunConfig &cfg) {
  return {pressure_of(cfg), potentials_of(cfg), grid_of(cfg)};
}

/// `indicator:<a>:<b>[:<height>]` (line) or `indicator:<radius>[:<height>]`
/// on radial grids. Without a height the indicator is normalised to unit
/// mass; with one it must already have unit mass.
inline DiscreteDensity initial_of(const RunConfig &cfg, const Grid &grid) {
  const std::string spec = cfg.text("initial", grid.is_line() ? "indicator:-0.5:0.5" : "indicator:0.5");
  if (spec.rfind("indicator:", 0) != 0)
    throw ConfigError("initial must be indicator:...");
  std::vector<double> args;
  std::string rest = spec.substr(10);
  std::replace(rest.begin(), rest.end(), ':', ',');
  args = parse_real_list(rest);
  const bool has_height = grid.is_line() ? args.size() == 3 : args.size() == 2;
  DiscreteDensity rho = [&] {
    if (grid.is_line()) {
      if (args.size() < 2 || args.size() > 3)
        throw ConfigError("line initial data takes indicator:<a>:<b>[:<height>]");
      return DiscreteDensity::indicator(grid, args[0], args[1], args.size() == 3 ? args[2] : 1.0);
    }
    if (args.empty() || args.size() > 2)
      throw ConfigError("radial initial data takes indicator:<radius>[:<height>]");
    return DiscreteDensity::indicator(grid, 0.0, args[0], args.size() == 2 ? args[1] : 1.0);
  }();
  if (!has_height)
    return normalize(rho);
  if (std::abs(mass(rho) - 1.0) > 1e-10)
    throw ConfigError("initial data '" + spec + "' does not have unit mass (mass " +
                      std::to_string(mass(rho)) + ")");
  return rho;
}

inline EvolutionFamily family_of(const RunConfig &cfg) {
  EvolutionFamily f;
  f.potentials = potentials_of(cfg);
  f.grid = grid_of(cfg);
  f.final_time = cfg.real("T", 2.0);
  f.snapshot_count = static_cast<std::size_t>(cfg.real("snapshots", 41));
  f.cfl_safety = cfg.real("cfl", 0.45);
  return f;
}

inline ExpectedExponent expected_of(const RunConfig &cfg, ExpectedExponent fallback) {
  if (cfg.has("expect")) {
    const auto bounds = cfg.list("expect", {});
    fallback.lo = bounds[0];
    fallback.hi = bounds[1];
  }
  fallback.min_r_squared = cfg.real("min_r2", fallback.min_r_squared);
  return fallback;
}

} // namespace hslimit
