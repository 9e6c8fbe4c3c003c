#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isotherm/errors.hpp"
#include "isotherm/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heat flows in tubular neighbourhoods: solvers, heat content, curvature invariants"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  app.add_option("--config", config_path, "JSON experiment config (defaults when omitted)");
  app.add_option("--seed", seed, "Monte Carlo seed (overrides the config)");
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--workers", workers, "worker threads (overrides the config)")
      ->check(CLI::PositiveNumber);

  for (const char* name : {"geometry", "solve", "content", "balance", "invariants", "calibrate", "verify"})
    app.add_subcommand(name)->fallthrough();
  app.get_subcommand("geometry")->description("curvature sweep and bound check");
  app.get_subcommand("solve")->description("solve the configured heat problem at probe points");
  app.get_subcommand("content")->description("ball heat-content series and power-law fits");
  app.get_subcommand("balance")->description("balance-law spreads across surface centers");
  app.get_subcommand("invariants")->description("curvature invariants and classification verdicts");
  app.get_subcommand("calibrate")->description("calibrate c(3) per problem family");
  app.get_subcommand("verify")->description("full pipeline with consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  isotherm::ExperimentConfig config;
  try {
    config = config_path.empty() ? isotherm::parse_config("{}") : isotherm::load_config(config_path);
  } catch (const isotherm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (seed) config.seed = *seed;
  if (out) config.out = *out;
  if (workers) config.workers = *workers;

  return isotherm::run_command(app.get_subcommands().front()->get_name(), config, std::cout,
                               std::cerr);
}
