#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "isotherm/errors.hpp"
#include "isotherm/geometry.hpp"

namespace isotherm {

namespace {

struct NewtonResult {
  ChartPoint uv;
  double dist2 = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

double half_dist2(const SurfaceChart& chart, ChartPoint uv, const Vec3& p) {
  return 0.5 * (chart.point(uv) - p).squaredNorm();
}

NewtonResult newton_from(const Vec3& p, const SurfaceChart& chart, ChartPoint start,
                         const ProjectionOptions& opt) {
  NewtonResult res;
  ChartPoint uv = chart.canonical(start);
  double f = half_dist2(chart, uv, p);
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    const ChartDerivatives d = chart.derivatives(uv);
    const Vec3 r = d.point - p;
    const double gu = r.dot(d.du), gv = r.dot(d.dv);
    const double huu = d.du.dot(d.du) + r.dot(d.duu);
    const double huv = d.du.dot(d.dv) + r.dot(d.duv);
    const double hvv = d.dv.dot(d.dv) + r.dot(d.dvv);
    const double det = huu * hvv - huv * huv;
    double su, sv;
    if (huu > 0.0 && det > 1e-14 * huu * hvv) {
      su = -(hvv * gu - huv * gv) / det;
      sv = -(huu * gv - huv * gu) / det;
    } else {
      // indefinite Hessian: metric-scaled gradient step
      su = -gu / std::max(d.du.squaredNorm(), 1e-300);
      sv = -gv / std::max(d.dv.squaredNorm(), 1e-300);
    }
    double alpha = 1.0;
    ChartPoint trial;
    double f_trial = f;
    for (int ls = 0; ls < 40; ++ls) {
      trial = chart.canonical({uv.u + alpha * su, uv.v + alpha * sv});
      f_trial = half_dist2(chart, trial, p);
      if (f_trial <= f) break;
      alpha *= 0.5;
    }
    if (!(f_trial <= f)) {
      // no descent possible: at a (possibly constrained) stationary point
      res.converged = std::hypot(su, sv) < 1e3 * opt.uv_tol || std::hypot(gu, gv) < 1e-13;
      break;
    }
    // measure the step actually taken (clamping or wrapping may shorten it)
    double du = trial.u - uv.u, dv = trial.v - uv.v;
    const auto& rect = chart.rect();
    if (rect.u_periodic) du = std::remainder(du, rect.u_max - rect.u_min);
    if (rect.v_periodic) dv = std::remainder(dv, rect.v_max - rect.v_min);
    uv = trial;
    f = f_trial;
    if (std::max(std::abs(du), std::abs(dv)) < opt.uv_tol) {
      res.converged = true;
      break;
    }
  }
  res.uv = uv;
  res.dist2 = 2.0 * f;
  return res;
}

Projection finish(const Vec3& p, const SurfaceChart& chart, ChartPoint uv) {
  const Vec3 foot = chart.point(uv);
  const Vec3 r = p - foot;
  const double sign = r.dot(chart.normal(uv)) >= 0.0 ? 1.0 : -1.0;
  return {uv, foot, sign * r.norm()};
}

}  // namespace

Projection project_newton(const Vec3& p, const SurfaceChart& chart,
                          const ProjectionOptions& opt) {
  NewtonResult best;
  int attempts = 0;
  auto consider = [&](ChartPoint start) {
    const NewtonResult r = newton_from(p, chart, start, opt);
    ++attempts;
    if (r.converged && r.dist2 < best.dist2) best = r;
  };

  if (opt.use_hints)
    for (const ChartPoint h : chart.projection_hints(p)) consider(h);

  if (!best.converged) {
    const Vec3 local = p - chart.origin();
    const auto& grid = chart.coarse_grid();
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      ranked.emplace_back((grid[i].second - local).squaredNorm(), i);
    const std::size_t k = std::min<std::size_t>(std::max(opt.starts, 1), ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());
    for (std::size_t i = 0; i < k; ++i) consider(grid[ranked[i].second].first);
  }

  if (!best.converged) {
    std::ostringstream os;
    os << "nearest-point projection did not converge for p = (" << p.x() << ", " << p.y() << ", "
       << p.z() << ") on " << chart.label() << " after " << attempts << " starts";
    throw EvaluationError(os.str());
  }
  return finish(p, chart, best.uv);
}

Projection signed_distance(const Vec3& p, const SurfaceChart& chart,
                           const ProjectionOptions& options) {
  if (options.use_closed_form)
    if (auto proj = chart.closed_form_projection(p)) return *proj;
  return project_newton(p, chart, options);
}

std::string to_string(Region region) {
  switch (region) {
    case Region::omega_plus: return "omega_plus";
    case Region::omega_minus: return "omega_minus";
    case Region::tube: return "tube";
  }
  return "unknown";
}

Region classify_point(const Vec3& p, const SurfaceChart& chart, double R,
                      const ProjectionOptions& options) {
  const double d = signed_distance(p, chart, options).distance;
  if (d > R) return Region::omega_plus;
  if (d < -R) return Region::omega_minus;
  return Region::tube;
}

}  // namespace isotherm
