#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isotherm/geometry.hpp"
#include "isotherm/heat.hpp"

namespace isotherm {

struct Tolerances {
  double constancy = 1e-8;     ///< relative std of an invariant
  double equality = 1e-8;      ///< c = 2, c = 0, H = 0
  double umbilic = 1e-6;       ///< |k1 - k2|
  double balance = 1e-6;       ///< relative spread counted as balanced
  double exponent = 0.05;      ///< |p - (N+1)/4|
  double amplitude_ratio = 0.03;
  double calibration = 0.02;   ///< relative spread of c(N) across R
  double trace = 1e-3;         ///< |u| on the surface for signed problems
  double sandwich_ibvp = 0.02;
  double range = 1e-6;         ///< maximum principle slack
  double identity = 1e-12;     ///< algebraic identities
};

struct ExperimentConfig {
  SurfaceParams surface = SphereParams{2.0};
  double R = 1.0;
  Problem problem = Problem::cauchy_sum;
  std::vector<double> times;          ///< heat-content grid, decreasing
  std::vector<double> solve_times;    ///< probe output times, increasing
  std::vector<double> balance_times;  ///< balance-law times
  std::vector<double> calibration_R;
  std::uint64_t seed = 20240611;
  std::size_t content_samples = std::size_t{1} << 16;
  std::size_t kernel_samples = std::size_t{1} << 16;
  int workers = 1;
  int nu = 64, nv = 64;
  std::optional<SampleRegion> region;  ///< whole rectangle when absent
  std::vector<ChartPoint> centers;     ///< kind-specific defaults when empty
  int line_cells = 400;
  double grid_spacing = 0.1;
  Tolerances tolerances;
  /// Expected verdict tags, keyed "sum" or "diff".
  std::map<std::string, std::string> expect;
  std::string out = "out";
};

/// Parses the JSON config text; every omitted field takes its default and
/// the default time grids are filled in. Throws ConfigError on unknown keys,
/// wrong types or invalid values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Fully resolved config as JSON text; parse_config of it gives back an
/// equivalent config.
std::string dump_config(const ExperimentConfig& config);

SurfaceChart config_chart(const ExperimentConfig& config);
SampleRegion config_region(const ExperimentConfig& config, const SurfaceChart& chart);
/// Centers on the surface used by solve, content, balance and verify.
std::vector<ChartPoint> config_centers(const ExperimentConfig& config, const SurfaceChart& chart);

/// Raised by a pipeline stage whose check did not pass.
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs one subcommand (geometry, solve, content, balance, invariants,
/// calibrate, verify), writing its outputs under config.out. Returns the
/// process exit code: 0 pass, 1 assertion or evaluation failure, 2 config or
/// geometry error. Messages go to the given streams.
int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& out,
                std::ostream& err);

}  // namespace isotherm
