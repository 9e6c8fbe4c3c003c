#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "isotherm/geometry.hpp"
#include "isotherm/heat.hpp"
#include "isotherm/numerics.hpp"

namespace isotherm {

struct BallQuadrature {
  std::size_t samples = std::size_t{1} << 16;  ///< Monte Carlo route only
  std::uint64_t seed = 20240611;
  /// Flag estimates whose absolute error exceeds this.
  double tolerance = std::numeric_limits<double>::infinity();
  int workers = 1;
  bool force_monte_carlo = false;  ///< skip the reduced 1-D routes
};

/// Integral of u(., t) over the ball B_R(center). Constant, planar and radial
/// fields reduce to a 1-D integral (disc or spherical-cap areas times the
/// profile); anything else uses Monte Carlo stratified in equal-volume shells
/// and angular cells, drawing from field.sample.
Estimate ball_heat_content(const TemperatureField& field, const Vec3& center, double R, double t,
                           const BallQuadrature& quadrature = {});

struct HeatContentSeries {
  std::string field;
  Vec3 center = Vec3::Zero();
  double R = 0.0;
  std::vector<double> times;  ///< strictly decreasing
  std::vector<Estimate> values;
};

/// t0 * ratio^k for k = 0 .. count-1.
std::vector<double> geometric_times(double t0 = 1e-2, int count = 7, double ratio = 0.5);

HeatContentSeries heat_content_series(const TemperatureField& field, const Vec3& center, double R,
                                      std::span<const double> times,
                                      const BallQuadrature& quadrature = {});

struct PowerLawFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  ///< sum of squared log residuals
  double t_min = 0.0, t_max = 0.0;
  std::size_t points = 0;
};

/// Least squares of log Q against log t over the points with relative error
/// below max_relative_error. Throws EvaluationError with fewer than 4.
PowerLawFit fit_power_law(const HeatContentSeries& series, double max_relative_error = 0.1);
PowerLawFit fit_power_law(std::span<const double> times, std::span<const double> values);

/// Leading amplitude with the exponent pinned: Q / t^p fitted by a quadratic
/// in sqrt(t) and evaluated at t = 0. The error is the change against a
/// linear fit.
Estimate extrapolate_amplitude(const HeatContentSeries& series, double exponent,
                               double max_relative_error = 0.1);

/// Content of the half-space aux solution in B_R of a boundary point, N
/// dimensions: Cauchy data 1/2 erfc, Dirichlet data erfc of (R - z)/2sqrt(t).
double halfspace_ball_content(double R, double t, int dimension, Family family);

struct Calibration {
  Family family = Family::cauchy;
  int dimension = 3;
  double R = 1.0;
  double cN = 0.0;
  Estimate amplitude;
  PowerLawFit fit;
};

/// c(N) = A_plane / R^{(N-1)/2} from the half-space series over `times`.
Calibration calibrate_cN(double R, int dimension, Family family, std::span<const double> times);

/// cN * prod(1/R - k_j)^{-1/2} over the offset principal curvatures. Throws
/// DomainError when a factor is not positive or the result is not finite.
double predicted_amplitude(const CurvaturePair& offset_pair, double R, double cN);

struct BalanceRow {
  double t = 0.0;
  std::vector<Estimate> contents;  ///< one per center
  std::vector<Estimate> traces;    ///< u(center, t)
  double mean = 0.0;
  double spread = 0.0;  ///< (max - min) / max(|mean|, floor)
  double noise = 0.0;   ///< relative 1-sigma of max - min
  bool significant = false;  ///< spread > 3 noise
  bool resolved = true;      ///< 3 noise <= tolerance, so a balanced row means something
};

struct BalanceReport {
  std::string field;
  double R = 0.0;
  std::vector<Vec3> centers;
  std::vector<BalanceRow> rows;
  double max_spread = 0.0;
  double max_trace_spread = 0.0;  ///< absolute max - min of u(center, t)
  double max_abs_trace = 0.0;
};

/// Ball contents across centers on the surface at each time, with the
/// boundary trace u(center, t). `tolerance` is the relative spread below
/// which the balance law counts as holding.
BalanceReport balance_law_report(const TemperatureField& field, std::span<const Vec3> centers,
                                 double R, std::span<const double> times,
                                 const BallQuadrature& quadrature = {}, double tolerance = 1e-6);

inline constexpr double spread_floor = 1e-12;

}  // namespace isotherm
