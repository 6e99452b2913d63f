// Command-line front end: hslimit <command> [key=value ...] [--config f] [--out dir] [--jobs n]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hslimit/cli.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Porous-medium / Hele-Shaw limit rate experiments"};
  std::string command;
  std::vector<std::string> overrides;
  std::string config_path;
  std::string out_dir = "hslimit-out";
  unsigned jobs = 1;
  app.add_option("command", command,
                 "simulate | rates-evolution | rates-singular | rates-stationary | threshold | "
                 "self-test")
      ->required();
  app.add_option("overrides", overrides, "key=value assignments, applied after --config");
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "concurrent sweep jobs")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hslimit::exit_config;
  }

  hslimit::RunConfig cfg;
  try {
    cfg.command = hslimit::parse_command(command);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw hslimit::ConfigError("cannot read config file " + config_path);
      std::stringstream text;
      text << in.rdbuf();
      cfg = hslimit::parse_config(text.str(), cfg);
    }
    std::size_t position = 0;
    for (const auto &assignment : overrides)
      hslimit::assign(cfg, assignment, ++position);
  } catch (const hslimit::ConfigLineError &e) {
    std::cerr << "configuration error: " << e.what() << '\n' << "  " << e.content() << '\n';
    return hslimit::exit_config;
  } catch (const hslimit::ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return hslimit::exit_config;
  }
  cfg.output_dir = out_dir;
  cfg.jobs = jobs;
  return hslimit::run(cfg, std::cout, std::cerr);
}
