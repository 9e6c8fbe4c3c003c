#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chart_impl.hpp"
#include "isotherm/errors.hpp"

namespace isotherm {

using std::numbers::pi;

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::plane: return "plane";
    case SurfaceKind::sphere: return "sphere";
    case SurfaceKind::cylinder: return "cylinder";
    case SurfaceKind::torus: return "torus";
    case SurfaceKind::helicoid: return "helicoid";
    case SurfaceKind::graph: return "graph";
  }
  return "unknown";
}

bool ParameterRect::contains(ChartPoint p, double slack) const {
  const bool in_u = u_periodic || (p.u >= u_min - slack && p.u <= u_max + slack);
  const bool in_v = v_periodic || (p.v >= v_min - slack && p.v <= v_max + slack);
  return in_u && in_v;
}

namespace detail {
namespace {

std::string fmt_num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

class PlaneChart final : public ChartImpl {
 public:
  ChartDerivatives derivatives(ChartPoint uv) const override {
    return {Vec3(uv.u, uv.v, 0.0), Vec3::UnitX(), Vec3::UnitY(),
            Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  }
  std::optional<Projection> project(const Vec3& p) const override {
    return Projection{{p.x(), p.y()}, Vec3(p.x(), p.y(), 0.0), p.z()};
  }
  std::string label() const override { return "plane"; }
  bool unbounded() const override { return true; }
};

class SphereChart final : public ChartImpl {
 public:
  explicit SphereChart(double rho) : rho_(rho) {}

  // (theta, phi): polar angle, azimuth
  ChartDerivatives derivatives(ChartPoint uv) const override {
    const double st = std::sin(uv.u), ct = std::cos(uv.u);
    const double sp = std::sin(uv.v), cp = std::cos(uv.v);
    ChartDerivatives d;
    d.point = rho_ * Vec3(st * cp, st * sp, ct);
    d.du = rho_ * Vec3(ct * cp, ct * sp, -st);
    d.dv = rho_ * Vec3(-st * sp, st * cp, 0.0);
    d.duu = -d.point;
    d.duv = rho_ * Vec3(-ct * sp, ct * cp, 0.0);
    d.dvv = rho_ * Vec3(-st * cp, -st * sp, 0.0);
    return d;
  }
  std::optional<Projection> project(const Vec3& p) const override {
    const double r = p.norm();
    if (r < 1e-300) return Projection{{0.5 * pi, 0.0}, Vec3(rho_, 0.0, 0.0), -rho_};
    double phi = std::atan2(p.y(), p.x());
    if (phi < 0.0) phi += 2.0 * pi;
    const double theta = std::acos(std::clamp(p.z() / r, -1.0, 1.0));
    return Projection{{theta, phi}, (rho_ / r) * p, r - rho_};
  }
  std::vector<ChartPoint> hints(const Vec3& p) const override { return {project(p)->uv}; }
  std::string label() const override { return "sphere(rho=" + fmt_num(rho_) + ")"; }
  bool unbounded() const override { return false; }

 private:
  double rho_;
};

class CylinderChart final : public ChartImpl {
 public:
  explicit CylinderChart(double rho) : rho_(rho) {}

  // (theta, z), axis along z
  ChartDerivatives derivatives(ChartPoint uv) const override {
    const double s = std::sin(uv.u), c = std::cos(uv.u);
    ChartDerivatives d;
    d.point = Vec3(rho_ * c, rho_ * s, uv.v);
    d.du = Vec3(-rho_ * s, rho_ * c, 0.0);
    d.dv = Vec3::UnitZ();
    d.duu = Vec3(-rho_ * c, -rho_ * s, 0.0);
    d.duv = Vec3::Zero();
    d.dvv = Vec3::Zero();
    return d;
  }
  std::optional<Projection> project(const Vec3& p) const override {
    const double radial = std::hypot(p.x(), p.y());
    double theta = std::atan2(p.y(), p.x());
    if (theta < 0.0) theta += 2.0 * pi;
    const Vec3 foot(rho_ * std::cos(theta), rho_ * std::sin(theta), p.z());
    return Projection{{theta, p.z()}, foot, radial - rho_};
  }
  std::vector<ChartPoint> hints(const Vec3& p) const override { return {project(p)->uv}; }
  std::string label() const override { return "cylinder(rho=" + fmt_num(rho_) + ")"; }
  bool unbounded() const override { return true; }

 private:
  double rho_;
};

class TorusChart final : public ChartImpl {
 public:
  TorusChart(double a, double b) : a_(a), b_(b) {}

  // (theta, phi): tube angle, azimuth; du x dv points into the solid torus.
  ChartDerivatives derivatives(ChartPoint uv) const override {
    const double st = std::sin(uv.u), ct = std::cos(uv.u);
    const double sp = std::sin(uv.v), cp = std::cos(uv.v);
    const double w = b_ + a_ * ct;
    ChartDerivatives d;
    d.point = Vec3(w * cp, w * sp, a_ * st);
    d.du = Vec3(-a_ * st * cp, -a_ * st * sp, a_ * ct);
    d.dv = Vec3(-w * sp, w * cp, 0.0);
    d.duu = Vec3(-a_ * ct * cp, -a_ * ct * sp, -a_ * st);
    d.duv = Vec3(a_ * st * sp, -a_ * st * cp, 0.0);
    d.dvv = Vec3(-w * cp, -w * sp, 0.0);
    return d;
  }
  double normal_sign() const override { return -1.0; }
  std::optional<Projection> project(const Vec3& p) const override {
    double phi = std::atan2(p.y(), p.x());
    if (phi < 0.0) phi += 2.0 * pi;
    const double radial = std::hypot(p.x(), p.y());
    const double dr = radial - b_;
    const double dist_to_circle = std::hypot(dr, p.z());
    double theta = dist_to_circle > 0.0 ? std::atan2(p.z(), dr) : 0.0;
    if (theta < 0.0) theta += 2.0 * pi;
    const ChartPoint uv{theta, phi};
    return Projection{uv, derivatives(uv).point, dist_to_circle - a_};
  }
  std::vector<ChartPoint> hints(const Vec3& p) const override { return {project(p)->uv}; }
  std::string label() const override {
    return "torus(a=" + fmt_num(a_) + ",b=" + fmt_num(b_) + ")";
  }
  bool unbounded() const override { return false; }

 private:
  double a_, b_;
};

class HelicoidChart final : public ChartImpl {
 public:
  explicit HelicoidChart(double b) : b_(b) {}

  ChartDerivatives derivatives(ChartPoint uv) const override {
    const double s = std::sin(uv.v), c = std::cos(uv.v);
    ChartDerivatives d;
    d.point = Vec3(uv.u * c, uv.u * s, b_ * uv.v);
    d.du = Vec3(c, s, 0.0);
    d.dv = Vec3(-uv.u * s, uv.u * c, b_);
    d.duu = Vec3::Zero();
    d.duv = Vec3(-s, c, 0.0);
    d.dvv = Vec3(-uv.u * c, -uv.u * s, 0.0);
    return d;
  }
  // The sheets through a vertical line are spaced pi*b apart in z; try the
  // sheet at the query height and its two neighbours.
  std::vector<ChartPoint> hints(const Vec3& p) const override {
    std::vector<ChartPoint> out;
    for (int k = -1; k <= 1; ++k) {
      const double v = p.z() / b_ + k * pi;
      out.push_back({p.x() * std::cos(v) + p.y() * std::sin(v), v});
    }
    return out;
  }
  std::string label() const override { return "helicoid(b=" + fmt_num(b_) + ")"; }
  bool unbounded() const override { return true; }

 private:
  double b_;
};

class GraphChart final : public ChartImpl {
 public:
  GraphChart(double eps, double kx, double ky) : eps_(eps), kx_(kx), ky_(ky) {}

  ChartDerivatives derivatives(ChartPoint uv) const override {
    const double sx = std::sin(kx_ * uv.u), cx = std::cos(kx_ * uv.u);
    const double sy = std::sin(ky_ * uv.v), cy = std::cos(ky_ * uv.v);
    ChartDerivatives d;
    d.point = Vec3(uv.u, uv.v, eps_ * sx * sy);
    d.du = Vec3(1.0, 0.0, eps_ * kx_ * cx * sy);
    d.dv = Vec3(0.0, 1.0, eps_ * ky_ * sx * cy);
    d.duu = Vec3(0.0, 0.0, -eps_ * kx_ * kx_ * sx * sy);
    d.duv = Vec3(0.0, 0.0, eps_ * kx_ * ky_ * cx * cy);
    d.dvv = Vec3(0.0, 0.0, -eps_ * ky_ * ky_ * sx * sy);
    return d;
  }
  std::vector<ChartPoint> hints(const Vec3& p) const override { return {{p.x(), p.y()}}; }
  std::string label() const override {
    return "graph(eps=" + fmt_num(eps_) + ",kx=" + fmt_num(kx_) + ",ky=" + fmt_num(ky_) + ")";
  }
  bool unbounded() const override { return true; }

 private:
  double eps_, kx_, ky_;
};

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw ConfigError(std::string(what) + " must be positive and finite");
}

constexpr int kCoarseGrid = 24;

void build_grid(ChartImpl& impl) {
  const auto& r = impl.rect;
  impl.grid.reserve(kCoarseGrid * kCoarseGrid);
  for (int i = 0; i < kCoarseGrid; ++i) {
    for (int j = 0; j < kCoarseGrid; ++j) {
      // periodic directions skip the duplicated endpoint
      const double fu = r.u_periodic ? double(i) / kCoarseGrid : double(i) / (kCoarseGrid - 1);
      const double fv = r.v_periodic ? double(j) / kCoarseGrid : double(j) / (kCoarseGrid - 1);
      const ChartPoint uv{r.u_min + fu * (r.u_max - r.u_min), r.v_min + fv * (r.v_max - r.v_min)};
      impl.grid.emplace_back(uv, impl.derivatives(uv).point);
    }
  }
}

}  // namespace
}  // namespace detail

SurfaceChart make_surface(const SurfaceParams& params) {
  using namespace detail;
  std::shared_ptr<ChartImpl> impl;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PlaneParams>) {
          require_positive(p.half_extent, "plane half_extent");
          impl = std::make_shared<PlaneChart>();
          impl->kind = SurfaceKind::plane;
          impl->rect = {-p.half_extent, p.half_extent, -p.half_extent, p.half_extent};
        } else if constexpr (std::is_same_v<T, SphereParams>) {
          require_positive(p.radius, "sphere radius");
          impl = std::make_shared<SphereChart>(p.radius);
          impl->kind = SurfaceKind::sphere;
          // poles excluded
          impl->rect = {1e-3, pi - 1e-3, 0.0, 2.0 * pi, false, true};
        } else if constexpr (std::is_same_v<T, CylinderParams>) {
          require_positive(p.radius, "cylinder radius");
          require_positive(p.half_length, "cylinder half_length");
          impl = std::make_shared<CylinderChart>(p.radius);
          impl->kind = SurfaceKind::cylinder;
          impl->rect = {0.0, 2.0 * pi, -p.half_length, p.half_length, true, false};
        } else if constexpr (std::is_same_v<T, TorusParams>) {
          require_positive(p.tube_radius, "torus tube_radius");
          require_positive(p.center_radius, "torus center_radius");
          if (p.center_radius <= p.tube_radius)
            throw ConfigError("torus requires center_radius > tube_radius (else not immersed)");
          impl = std::make_shared<TorusChart>(p.tube_radius, p.center_radius);
          impl->kind = SurfaceKind::torus;
          impl->rect = {0.0, 2.0 * pi, 0.0, 2.0 * pi, true, true};
        } else if constexpr (std::is_same_v<T, HelicoidParams>) {
          require_positive(p.pitch, "helicoid pitch");
          require_positive(p.half_width, "helicoid half_width");
          require_positive(p.half_turns, "helicoid half_turns");
          impl = std::make_shared<HelicoidChart>(p.pitch);
          impl->kind = SurfaceKind::helicoid;
          const double v_max = 2.0 * pi * p.half_turns;
          impl->rect = {-p.half_width, p.half_width, -v_max, v_max};
        } else if constexpr (std::is_same_v<T, GraphParams>) {
          if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude))
            throw ConfigError("graph amplitude must be non-negative and finite");
          require_positive(p.kx, "graph kx");
          require_positive(p.ky, "graph ky");
          require_positive(p.half_extent, "graph half_extent");
          impl = std::make_shared<GraphChart>(p.amplitude, p.kx, p.ky);
          impl->kind = SurfaceKind::graph;
          impl->rect = {-p.half_extent, p.half_extent, -p.half_extent, p.half_extent};
        }
      },
      params);
  impl->params = params;
  build_grid(*impl);
  return SurfaceChart(std::move(impl));
}

SurfaceChart::SurfaceChart(std::shared_ptr<const detail::ChartImpl> impl)
    : impl_(std::move(impl)) {}

SurfaceKind SurfaceChart::kind() const { return impl_->kind; }
const SurfaceParams& SurfaceChart::params() const { return impl_->params; }
const ParameterRect& SurfaceChart::rect() const { return impl_->rect; }
bool SurfaceChart::unbounded() const { return impl_->unbounded(); }

std::string SurfaceChart::label() const {
  std::string s = impl_->label();
  if (orientation_ < 0.0) s += "[flipped]";
  if (!origin_.isZero()) {
    std::ostringstream os;
    os << "+(" << origin_.x() << "," << origin_.y() << "," << origin_.z() << ")";
    s += os.str();
  }
  return s;
}

ChartDerivatives SurfaceChart::derivatives(ChartPoint uv) const {
  ChartDerivatives d = impl_->derivatives(uv);
  d.point += origin_;
  return d;
}

Vec3 SurfaceChart::point(ChartPoint uv) const { return derivatives(uv).point; }

Vec3 SurfaceChart::normal(ChartPoint uv) const {
  const ChartDerivatives d = impl_->derivatives(uv);
  const Vec3 n = d.du.cross(d.dv);
  const double len = n.norm();
  if (!(len > 1e-14 * d.du.norm() * d.dv.norm()) || !std::isfinite(len))
    throw EvaluationError("degenerate metric (non-immersion) at (" + std::to_string(uv.u) + ", " +
                          std::to_string(uv.v) + ") on " + label());
  return (orientation_ * impl_->normal_sign() / len) * n;
}

std::optional<Projection> SurfaceChart::closed_form_projection(const Vec3& p) const {
  auto proj = impl_->project(p - origin_);
  if (!proj) return std::nullopt;
  proj->foot += origin_;
  proj->distance *= orientation_;
  return proj;
}

std::vector<ChartPoint> SurfaceChart::projection_hints(const Vec3& p) const {
  return impl_->hints(p - origin_);
}

const std::vector<std::pair<ChartPoint, Vec3>>& SurfaceChart::coarse_grid() const {
  return impl_->grid;
}

SurfaceChart SurfaceChart::flipped() const {
  SurfaceChart out = *this;
  out.orientation_ = -orientation_;
  return out;
}

SurfaceChart SurfaceChart::translated(const Vec3& shift) const {
  SurfaceChart out = *this;
  out.origin_ += shift;
  return out;
}

ChartPoint SurfaceChart::canonical(ChartPoint uv) const {
  const auto& r = impl_->rect;
  auto wrap = [](double x, double lo, double hi) {
    const double period = hi - lo;
    double y = std::fmod(x - lo, period);
    if (y < 0.0) y += period;
    return lo + y;
  };
  uv.u = r.u_periodic ? wrap(uv.u, r.u_min, r.u_max) : std::clamp(uv.u, r.u_min, r.u_max);
  uv.v = r.v_periodic ? wrap(uv.v, r.v_min, r.v_max) : std::clamp(uv.v, r.v_min, r.v_max);
  return uv;
}

SurfaceFrame surface_frame(const SurfaceChart& chart, ChartPoint uv) {
  const ChartDerivatives d = chart.derivatives(uv);
  SurfaceFrame frame;
  frame.point = d.point;
  frame.normal = chart.normal(uv);
  frame.tangent_u = d.du.normalized();
  frame.tangent_w = frame.normal.cross(frame.tangent_u);
  return frame;
}

}  // namespace isotherm
