#include <algorithm>
#include <cmath>
#include <sstream>

#include "isotherm/errors.hpp"
#include "isotherm/geometry.hpp"

namespace isotherm {

CurvaturePair::CurvaturePair(double a, double b) : k1_(std::min(a, b)), k2_(std::max(a, b)) {}

double CurvaturePair::max_abs() const { return std::max(std::abs(k1_), std::abs(k2_)); }

FundamentalForms fundamental_forms(const SurfaceChart& chart, ChartPoint uv) {
  const ChartDerivatives d = chart.derivatives(uv);
  const Vec3 n = chart.normal(uv);
  return {d.du.dot(d.du), d.du.dot(d.dv), d.dv.dot(d.dv),
          d.duu.dot(n),   d.duv.dot(n),   d.dvv.dot(n)};
}

CurvaturePair principal_curvatures(const FundamentalForms& f) {
  const double det = f.E * f.G - f.F * f.F;
  if (!(det > 0.0))
    throw EvaluationError("first fundamental form is not positive definite");
  // shape operator I^{-1} II = [[a, b], [c, d]]
  const double a = (f.G * f.L - f.F * f.M) / det;
  const double b = (f.G * f.M - f.F * f.N) / det;
  const double c = (f.E * f.M - f.F * f.L) / det;
  const double d = (f.E * f.N - f.F * f.M) / det;
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
    throw EvaluationError("non-finite second fundamental form");
  const double H = 0.5 * (a + d);
  const double half = 0.5 * (a - d);
  const double root = std::sqrt(std::max(half * half + b * c, 0.0));
  return {H - root, H + root};
}

CurvaturePair principal_curvatures(const SurfaceChart& chart, ChartPoint uv) {
  return principal_curvatures(fundamental_forms(chart, uv));
}

SampleRegion SampleRegion::whole(const SurfaceChart& chart, int nu, int nv) {
  const auto& r = chart.rect();
  return {r.u_min, r.u_max, r.v_min, r.v_max, nu, nv};
}

std::vector<ChartPoint> SampleRegion::points() const {
  if (nu < 1 || nv < 1) throw ConfigError("sample region needs at least one point per direction");
  std::vector<ChartPoint> out;
  out.reserve(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    const double u = nu == 1 ? 0.5 * (u_min + u_max) : u_min + (u_max - u_min) * i / (nu - 1);
    for (int j = 0; j < nv; ++j) {
      const double v = nv == 1 ? 0.5 * (v_min + v_max) : v_min + (v_max - v_min) * j / (nv - 1);
      out.push_back({u, v});
    }
  }
  return out;
}

BoundCheck curvature_bound_check(const SurfaceChart& chart, const SampleRegion& region,
                                 double R) {
  if (!(R > 0.0)) throw DomainError("offset radius R must be positive");
  BoundCheck out;
  for (const ChartPoint uv : region.points()) {
    const double scaled = R * principal_curvatures(chart, uv).max_abs();
    if (out.samples == 0 || scaled > out.sup_scaled) {
      out.sup_scaled = scaled;
      out.worst = uv;
    }
    ++out.samples;
  }
  out.pass = out.sup_scaled < 1.0;
  return out;
}

FootPointPair foot_points(const SurfaceChart& chart, ChartPoint uv, double R) {
  if (!(R > 0.0)) throw DomainError("offset radius R must be positive");
  const double scaled = R * principal_curvatures(chart, uv).max_abs();
  if (!(scaled < 1.0)) {
    std::ostringstream os;
    os << "curvature bound violated at (" << uv.u << ", " << uv.v << "): R*max|k| = " << scaled;
    throw DomainError(os.str());
  }
  const SurfaceFrame frame = surface_frame(chart, uv);
  return {frame.point, frame.point + R * frame.normal, frame.point - R * frame.normal, R};
}

OffsetCurvatures offset_curvatures(const CurvaturePair& pair, double R) {
  for (double k : {pair.k1(), pair.k2()}) {
    if (!(1.0 - R * k > 0.0) || !(1.0 + R * k > 0.0)) {
      std::ostringstream os;
      os << "offset curvature undefined: 1 -+ R*k must be positive (R=" << R << ", k=" << k << ")";
      throw DomainError(os.str());
    }
  }
  auto plus = [R](double k) { return -k / (1.0 - R * k); };
  auto minus = [R](double k) { return k / (1.0 + R * k); };
  return {{plus(pair.k1()), plus(pair.k2())}, {minus(pair.k1()), minus(pair.k2())}};
}

SurfaceChart offset_chart(const SurfaceChart& chart, OffsetSide side, double R) {
  if (!(R > 0.0)) throw DomainError("offset radius R must be positive");
  const double s = side == OffsetSide::plus ? 1.0 : -1.0;
  // Gamma_plus is seen from N_R through -nu, Gamma_minus through +nu.
  auto orient = [&](SurfaceChart c) {
    if (chart.orientation() * s > 0.0) c = c.flipped();
    return c.translated(chart.origin());
  };
  switch (chart.kind()) {
    case SurfaceKind::plane: {
      const auto& p = std::get<PlaneParams>(chart.params());
      SurfaceChart c = make_surface(p);
      if (s > 0.0) c = c.flipped();
      if (chart.orientation() < 0.0) c = c.flipped();
      return c.translated(chart.origin() + chart.orientation() * s * R * Vec3::UnitZ());
    }
    case SurfaceKind::sphere: {
      const double rho = std::get<SphereParams>(chart.params()).radius + chart.orientation() * s * R;
      if (!(rho > 0.0)) throw DomainError("offset sphere collapses: R >= rho");
      return orient(make_surface(SphereParams{rho}));
    }
    case SurfaceKind::cylinder: {
      auto p = std::get<CylinderParams>(chart.params());
      p.radius += chart.orientation() * s * R;
      if (!(p.radius > 0.0)) throw DomainError("offset cylinder collapses: R >= rho");
      return orient(make_surface(p));
    }
    default:
      throw ConfigError("no explicit offset chart for " + chart.label());
  }
}

}  // namespace isotherm
