#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace isotherm {

using Vec3 = Eigen::Vector3d;

struct ChartPoint {
  double u = 0.0;
  double v = 0.0;
};

// ---------------------------------------------------------------------------
// Surface catalog parameters. The variant alternative selects the kind.

struct PlaneParams {
  double half_extent = 8.0;  ///< chart rectangle is [-L, L]^2
};
struct SphereParams {
  double radius = 1.0;
};
struct CylinderParams {
  double radius = 1.0;
  double half_length = 8.0;
};
struct TorusParams {
  double tube_radius = 1.0;    ///< a
  double center_radius = 3.0;  ///< b, must exceed a
};
struct HelicoidParams {
  double pitch = 1.0;       ///< b in sigma(u,v) = (u cos v, u sin v, b v)
  double half_width = 6.0;  ///< |u| <= half_width
  double half_turns = 1.0;  ///< |v| <= 2*pi*half_turns
};
/// z = amplitude * sin(kx x) * sin(ky y)
struct GraphParams {
  double amplitude = 0.1;
  double kx = 1.0;
  double ky = 1.0;
  double half_extent = 6.283185307179586;
};

using SurfaceParams = std::variant<PlaneParams, SphereParams, CylinderParams, TorusParams,
                                   HelicoidParams, GraphParams>;

enum class SurfaceKind { plane, sphere, cylinder, torus, helicoid, graph };

std::string to_string(SurfaceKind kind);

/// Chart-coordinate rectangle with optional periodicity in each direction.
struct ParameterRect {
  double u_min = 0.0, u_max = 1.0;
  double v_min = 0.0, v_max = 1.0;
  bool u_periodic = false;
  bool v_periodic = false;

  bool contains(ChartPoint p, double slack = 1e-12) const;
};

/// sigma and its analytic partial derivatives at one chart point.
struct ChartDerivatives {
  Vec3 point;
  Vec3 du, dv;
  Vec3 duu, duv, dvv;
};

struct SurfaceFrame {
  Vec3 point;
  Vec3 normal;  ///< unit, pointing away from Omega (toward Omega_plus)
  Vec3 tangent_u;
  Vec3 tangent_w;  ///< normal x tangent_u
};

/// Closest point on a chart together with its chart coordinates.
struct Projection {
  ChartPoint uv;
  Vec3 foot;
  double distance = 0.0;  ///< signed, positive on the Omega_plus side
};

namespace detail {
class ChartImpl;
}

/// Immutable analytic parametrization of the surface bounding Omega. Cheap to
/// copy; the implementation is shared.
class SurfaceChart {
 public:
  SurfaceChart() = delete;

  SurfaceKind kind() const;
  const SurfaceParams& params() const;
  /// Human-readable id, e.g. "torus(a=1,b=3)".
  std::string label() const;
  const ParameterRect& rect() const;
  /// True when the underlying surface is unbounded and the rectangle is a
  /// truncation of it.
  bool unbounded() const;

  ChartDerivatives derivatives(ChartPoint uv) const;
  Vec3 point(ChartPoint uv) const;
  /// Unit normal oriented toward Omega_plus.
  Vec3 normal(ChartPoint uv) const;

  /// Exact closest point when the kind admits one (plane, sphere, cylinder,
  /// torus); std::nullopt otherwise.
  std::optional<Projection> closed_form_projection(const Vec3& p) const;
  /// Kind-specific Newton starting points for a query point.
  std::vector<ChartPoint> projection_hints(const Vec3& p) const;
  /// Coarse grid over the rectangle used for multistart projection, in
  /// chart-local coordinates (before translation).
  const std::vector<std::pair<ChartPoint, Vec3>>& coarse_grid() const;

  /// Same surface with the normal reversed (curvatures change sign).
  SurfaceChart flipped() const;
  SurfaceChart translated(const Vec3& shift) const;
  const Vec3& origin() const { return origin_; }
  double orientation() const { return orientation_; }

  /// Wrap periodic coordinates into the rectangle and clamp the rest.
  ChartPoint canonical(ChartPoint uv) const;

 private:
  friend SurfaceChart make_surface(const SurfaceParams&);
  explicit SurfaceChart(std::shared_ptr<const detail::ChartImpl> impl);

  std::shared_ptr<const detail::ChartImpl> impl_;
  Vec3 origin_ = Vec3::Zero();
  double orientation_ = 1.0;
};

/// Instantiate a catalog surface. Throws ConfigError on non-positive
/// dimensions or a non-immersed choice (torus with b <= a).
SurfaceChart make_surface(const SurfaceParams& params);

/// Point, unit normal and orthonormal tangent basis. Throws EvaluationError
/// at points where the metric degenerates.
SurfaceFrame surface_frame(const SurfaceChart& chart, ChartPoint uv);

// ---------------------------------------------------------------------------
// Curvature

/// Principal curvatures with k1 <= k2.
class CurvaturePair {
 public:
  CurvaturePair() = default;
  /// Accepts the two values in any order.
  CurvaturePair(double a, double b);

  double k1() const { return k1_; }
  double k2() const { return k2_; }
  double mean() const { return 0.5 * (k1_ + k2_); }
  double gauss() const { return k1_ * k2_; }
  double umbilicity_gap() const { return k2_ - k1_; }
  double max_abs() const;

 private:
  double k1_ = 0.0;
  double k2_ = 0.0;
};

struct FundamentalForms {
  double E, F, G;  // first
  double L, M, N;  // second, against the oriented normal
};

FundamentalForms fundamental_forms(const SurfaceChart& chart, ChartPoint uv);

/// Eigenvalues of the shape operator I^{-1} II, in closed form. With the
/// normal pointing away from Omega a sphere bounding Omega has k = -1/rho.
CurvaturePair principal_curvatures(const SurfaceChart& chart, ChartPoint uv);
CurvaturePair principal_curvatures(const FundamentalForms& forms);

/// Regular sampling grid over a sub-rectangle of chart coordinates.
struct SampleRegion {
  double u_min, u_max, v_min, v_max;
  int nu = 64;
  int nv = 64;

  static SampleRegion whole(const SurfaceChart& chart, int nu = 64, int nv = 64);
  std::vector<ChartPoint> points() const;
};

struct BoundCheck {
  bool pass = false;
  double sup_scaled = 0.0;  ///< sup over samples of R * max(|k1|, |k2|)
  ChartPoint worst;
  std::size_t samples = 0;
};

/// Checks max_j |k_j| < 1/R on every sample of the region.
BoundCheck curvature_bound_check(const SurfaceChart& chart, const SampleRegion& region,
                                 double R);

struct FootPointPair {
  Vec3 base;
  Vec3 plus;   ///< on Gamma_plus
  Vec3 minus;  ///< on Gamma_minus
  double R = 0.0;
};

/// x_plus = x + R nu, x_minus = x - R nu. Throws DomainError when
/// R * max|k| >= 1 at uv.
FootPointPair foot_points(const SurfaceChart& chart, ChartPoint uv, double R);

struct OffsetCurvatures {
  CurvaturePair plus;   ///< Gamma_plus, against the inward normal of N_R
  CurvaturePair minus;  ///< Gamma_minus, against the inward normal of N_R
};

/// Solves 1 - R k+ = 1/(1 - R k) and 1 - R k- = 1/(1 + R k) for each
/// principal direction. Throws DomainError unless 1 +- R k_j > 0.
OffsetCurvatures offset_curvatures(const CurvaturePair& pair, double R);

enum class OffsetSide { plus, minus };

/// Explicit chart of Gamma_plus or Gamma_minus, oriented by the inward normal
/// of N_R. Only sphere, cylinder and plane have one in the catalog; other
/// kinds throw ConfigError.
SurfaceChart offset_chart(const SurfaceChart& chart, OffsetSide side, double R);

// ---------------------------------------------------------------------------
// Distance

struct ProjectionOptions {
  bool use_closed_form = true;  ///< use the exact projector when available
  bool use_hints = true;        ///< seed Newton with kind-specific guesses
  int starts = 4;               ///< coarse-grid starts when hints are off or fail
  double uv_tol = 1e-10;
  int max_iterations = 100;
};

/// Closest point by damped Newton on |sigma(u,v) - p|^2 with multistart.
/// Throws EvaluationError when no start converges.
Projection project_newton(const Vec3& p, const SurfaceChart& chart,
                          const ProjectionOptions& options = {});

/// Signed distance, positive on the Omega_plus side, and the nearest chart
/// point. Valid where the nearest-point projection is unique (|d| below the
/// reach, which is at least 1/sup|k| for the catalog).
Projection signed_distance(const Vec3& p, const SurfaceChart& chart,
                           const ProjectionOptions& options = {});

enum class Region { omega_plus, omega_minus, tube };

std::string to_string(Region region);

/// d > R -> Omega_plus, d < -R -> Omega_minus, otherwise N_R.
Region classify_point(const Vec3& p, const SurfaceChart& chart, double R,
                      const ProjectionOptions& options = {});

}  // namespace isotherm
