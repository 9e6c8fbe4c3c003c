#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isotherm/geometry.hpp"
#include "isotherm/numerics.hpp"

namespace isotherm {

/// The four heat problems on the tubular neighbourhood and the auxiliary
/// single-component problems used to decompose and sandwich them.
enum class Problem {
  ibvp_ones,            ///< u = 1 on both components of the tube boundary
  cauchy_sum,           ///< initial data chi(Omega+) + chi(Omega-)
  ibvp_pm,              ///< u = 1 on Gamma+, u = -1 on Gamma-
  cauchy_diff,          ///< initial data chi(Omega+) - chi(Omega-)
  aux_plus,             ///< initial data chi(Omega+)
  aux_minus,            ///< initial data chi(Omega-)
  aux_plus_dirichlet,   ///< u = 1 on Gamma+, in the complement of Omega+
  aux_minus_dirichlet,  ///< u = 1 on Gamma-, in the complement of Omega-
};

enum class Family { cauchy, ibvp };

std::string to_string(Problem problem);
Problem parse_problem(const std::string& name);
Family family_of(Problem problem);
/// True for the problems with data of both signs.
bool is_signed(Problem problem);

struct HeatProblemSpec {
  Problem problem = Problem::cauchy_sum;
  SurfaceChart chart;
  double R = 1.0;
  int dimension = 3;
  ProjectionOptions projection{};
};

/// Throws DomainError when the curvature bound fails on the chart's rectangle
/// (sampled at the given resolution), ConfigError on unsupported dimension.
void validate(const HeatProblemSpec& spec, int samples_per_direction = 48);

/// Initial-data value of a Cauchy problem in a region: +-1 or 0.
double initial_data(Problem problem, Region region);

enum class Provenance { kernel_quadrature, radial_fd, slab_fd, grid_fd, closed_form };

std::string to_string(Provenance p);

/// u depends only on the signed height (p - origin) . normal.
struct PlanarProfile {
  Vec3 origin = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  std::function<double(double height, double t)> value;
  std::vector<double> fronts;  ///< heights where the profile is steep at small t
};

/// u depends only on |p - center|.
struct RadialProfile {
  Vec3 center = Vec3::Zero();
  std::function<double(double r, double t)> value;
  std::vector<double> fronts;  ///< radii where the profile is steep at small t
};

/// An evaluatable solution u(x, t). Immutable and safe to share between
/// threads.
class TemperatureField {
 public:
  using Evaluator = std::function<Estimate(const Vec3&, double)>;
  /// Unbiased single-draw estimator of u(p, t); exact fields return value().
  using Sampler = std::function<double(const Vec3&, double, RandomStream&)>;

  struct Range {
    double lo = 0.0;
    double hi = 1.0;
  };

  TemperatureField(std::string id, Provenance provenance, Range range, Evaluator evaluator,
                   Sampler sampler = {});

  Estimate value(const Vec3& p, double t) const { return evaluator_(p, t); }
  double sample(const Vec3& p, double t, RandomStream& rng) const;
  /// True when sample() has variance (Monte Carlo backed).
  bool stochastic() const { return static_cast<bool>(sampler_); }

  const std::string& id() const { return id_; }
  void rename(std::string id) { id_ = std::move(id); }
  Provenance provenance() const { return provenance_; }
  Range range() const { return range_; }

  std::optional<Problem> problem;
  std::string surface;  ///< chart label the field was built on
  double R = std::numeric_limits<double>::quiet_NaN();
  std::optional<PlanarProfile> planar;
  std::optional<RadialProfile> radial;
  std::optional<double> constant;
  /// Numbers describing how the field was produced (grid, steps, seed ...).
  std::map<std::string, double> diagnostics;

 private:
  std::string id_;
  Provenance provenance_;
  Range range_;
  Evaluator evaluator_;
  Sampler sampler_;
};

TemperatureField constant_field(double value);

// ---------------------------------------------------------------------------
// Closed-form and reduced oracles

/// 1/2 erfc(d / (2 sqrt t)): the Cauchy solution with data chi(height < 0)
/// at signed height d.
double halfspace_oracle(double d, double t);

/// erfc(d / (2 sqrt t)) for d >= 0: the Dirichlet solution in a half-space
/// held at 1 on its boundary.
double halfspace_dirichlet(double d, double t);

enum class BallSide { inside, outside };

/// Gaussian-kernel mass of the ball of radius `ball_radius` (or of its
/// complement) seen from distance r of its centre, in 3-D, computed as a
/// radial 1-D integral of the shell-averaged kernel.
Estimate ball_radial_oracle(double r, double ball_radius, double t,
                            BallSide side = BallSide::inside);

/// Dirichlet solution outside a ball of radius s held at 1 (3-D).
double ball_exterior_dirichlet(double r, double s, double t);
/// Dirichlet solution inside a ball of radius s held at 1 (3-D), by images.
double ball_interior_dirichlet(double r, double s, double t);

// ---------------------------------------------------------------------------
// Cauchy problems by kernel quadrature

struct CauchyQuadrature {
  std::size_t samples = std::size_t{1} << 16;  ///< antithetic pairs
  std::uint64_t seed = 20240611;
  double tolerance = std::numeric_limits<double>::infinity();  ///< on 3 sigma
  int workers = 1;
};

/// Gaussian-kernel integral of the initial data of a Cauchy-family problem,
/// by stratified Monte Carlo with antithetic pairs. The stream depends on
/// (seed, point, t) only, so problems evaluated at the same point share
/// samples and superpositions hold exactly. `converged` is false when
/// 3 sigma exceeds quadrature.tolerance.
Estimate cauchy_solution(const HeatProblemSpec& spec, const Vec3& point, double t,
                         const CauchyQuadrature& quadrature = {});

// ---------------------------------------------------------------------------
// IBVP solvers

enum class TimeScheme { backward_euler, crank_nicolson, explicit_euler };

std::string to_string(TimeScheme scheme);

struct TimeStepping {
  TimeScheme scheme = TimeScheme::crank_nicolson;
  double max_dt = 1e-3;  ///< dt = min(max_dt, t_first / 20)
};

/// Dirichlet values on Gamma+ and Gamma-.
struct BoundaryValues {
  double plus = 1.0;
  double minus = 1.0;
};

struct LineGrid {
  int cells = 400;
  bool estimate_error = true;  ///< re-solve with half the cells
};

/// Snapshots of a 1-D solution on a uniform grid from `lo` to `hi`.
struct LineSolution {
  double lo = 0.0, hi = 1.0;
  std::vector<double> times;                ///< 0 followed by the output times
  std::vector<std::vector<double>> values;  ///< one row per time, cells+1 nodes
  std::size_t steps = 0;
  double dt = 0.0;

  /// Linear in space and in time; clamps x to [lo, hi].
  double value(double x, double t) const;
};

/// u_t = u_xx + (weight_exponent / x) u_x on (lo, hi) with Dirichlet data
/// (value_lo, value_hi) for t > 0 and zero initial data.
LineSolution solve_line(double lo, double hi, double weight_exponent, double value_lo,
                        double value_hi, int cells, std::span<const double> times,
                        const TimeStepping& stepping);

/// Spherical annulus rho - R < r < rho + R around `center` (N = 3 by default).
TemperatureField solve_ibvp_radial(double rho, double R, BoundaryValues values,
                                   std::span<const double> times, const LineGrid& grid = {},
                                   const TimeStepping& stepping = {}, int dimension = 3,
                                   const Vec3& center = Vec3::Zero());

/// Slab -R < height < R with Gamma+ at height +R.
TemperatureField solve_ibvp_slab(double R, BoundaryValues values, std::span<const double> times,
                                 const LineGrid& grid = {}, const TimeStepping& stepping = {},
                                 const Vec3& origin = Vec3::Zero(),
                                 const Vec3& normal = Vec3::UnitZ());

struct GridSpec {
  double spacing = 0.1;
  /// Explicit box {xmin, ymin, zmin, xmax, ymax, zmax}; computed when absent.
  std::optional<std::array<double, 6>> box;
  /// Lateral half-width for unbounded charts; 0 picks L with
  /// exp(-L^2 / 4 t_max) < 1e-12.
  double lateral_extent = 0.0;
  bool estimate_error = true;  ///< re-solve at twice the spacing
  double solver_tolerance = 1e-10;
  int workers = 1;
};

/// Backward-Euler finite differences on a Cartesian grid covering N_R, with
/// Dirichlet data on Gamma+- imposed through cut-cell (Shortley-Weller)
/// stencils located from the signed distance. Faces of the box that cut an
/// unbounded tube are zero-flux. Throws ConfigError when 2R spans fewer than
/// 8 cells.
TemperatureField solve_ibvp_3d(const SurfaceChart& chart, double R, BoundaryValues values,
                               const GridSpec& grid, std::span<const double> times,
                               const TimeStepping& stepping = {TimeScheme::backward_euler, 1e-3},
                               const ProjectionOptions& projection = {});

// ---------------------------------------------------------------------------
// Field construction

struct FieldOptions {
  CauchyQuadrature quadrature{};
  bool force_quadrature = false;  ///< skip reduced/closed forms for Cauchy problems
  std::vector<double> times;      ///< output times, required for IBVPs
  LineGrid line{};
  GridSpec grid{};
  TimeStepping stepping{};
};

/// Builds the solution of spec.problem, choosing the most accurate route:
/// closed form or radial reduction for plane and sphere Cauchy problems, the
/// slab/radial solvers for plane and sphere IBVPs, kernel quadrature or the
/// 3-D solver otherwise.
TemperatureField make_field(const HeatProblemSpec& spec, const FieldOptions& options = {});

// ---------------------------------------------------------------------------
// Checks

struct ComparisonReport {
  double max_violation = -std::numeric_limits<double>::infinity();
  Vec3 worst_point = Vec3::Zero();
  double worst_time = 0.0;
  std::size_t evaluations = 0;
};

/// Largest signed violation of max{u+, u-} <= u <= u+ + u- (sum family) or
/// max{-u-, u+ - 2u-} <= u <= min{u+, 2u+ - u-} (signed family) over the
/// samples. Negative means every inequality holds with slack. Throws
/// ConfigError when the three fields were not built on the same chart and R.
ComparisonReport comparison_bounds_check(const TemperatureField& u,
                                         const TemperatureField& u_plus,
                                         const TemperatureField& u_minus,
                                         std::span<const Vec3> samples,
                                         std::span<const double> times, Problem problem);

struct VaradhanRow {
  Vec3 point;
  double t = 0.0;
  double log_scaled = 0.0;  ///< -4 t log u
  double dist2 = 0.0;
  double ratio = 0.0;  ///< log_scaled / dist2 (or log_scaled when dist2 = 0)
};

struct VaradhanProbe {
  Vec3 point;
  double distance = 0.0;  ///< to Gamma+ or Gamma-
};

struct VaradhanTable {
  std::vector<VaradhanRow> rows;
  /// Per probe: the smallest t at which u was still a positive normal number.
  std::vector<double> smallest_usable_t;
  bool underflow = false;
};

/// -4 t log u(x, t) against dist(x, Gamma)^2 for decreasing times.
VaradhanTable varadhan_check(const TemperatureField& aux, std::span<const VaradhanProbe> probes,
                             std::span<const double> times);

/// Distance from p to Gamma+ (R - d) or Gamma- (R + d), d the signed
/// distance to the surface; valid inside the reach.
double distance_to_offset(const Vec3& p, const SurfaceChart& chart, double R, OffsetSide side,
                          const ProjectionOptions& projection = {});

}  // namespace isotherm
