#include <algorithm>
#include <cmath>
#include <sstream>

#include "isotherm/errors.hpp"
#include "isotherm/heat.hpp"

namespace isotherm {

std::string to_string(Problem problem) {
  switch (problem) {
    case Problem::ibvp_ones: return "ibvp_ones";
    case Problem::cauchy_sum: return "cauchy_sum";
    case Problem::ibvp_pm: return "ibvp_pm";
    case Problem::cauchy_diff: return "cauchy_diff";
    case Problem::aux_plus: return "aux_plus";
    case Problem::aux_minus: return "aux_minus";
    case Problem::aux_plus_dirichlet: return "aux_plus_dirichlet";
    case Problem::aux_minus_dirichlet: return "aux_minus_dirichlet";
  }
  return "unknown";
}

Problem parse_problem(const std::string& name) {
  for (Problem p : {Problem::ibvp_ones, Problem::cauchy_sum, Problem::ibvp_pm, Problem::cauchy_diff,
                    Problem::aux_plus, Problem::aux_minus, Problem::aux_plus_dirichlet,
                    Problem::aux_minus_dirichlet})
    if (to_string(p) == name) return p;
  throw ConfigError("unknown problem '" + name + "'");
}

Family family_of(Problem problem) {
  switch (problem) {
    case Problem::ibvp_ones:
    case Problem::ibvp_pm:
    case Problem::aux_plus_dirichlet:
    case Problem::aux_minus_dirichlet: return Family::ibvp;
    default: return Family::cauchy;
  }
}

bool is_signed(Problem problem) {
  return problem == Problem::ibvp_pm || problem == Problem::cauchy_diff;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kernel_quadrature: return "kernel-quadrature";
    case Provenance::radial_fd: return "radial-FD";
    case Provenance::slab_fd: return "slab-FD";
    case Provenance::grid_fd: return "3d-FD";
    case Provenance::closed_form: return "closed-form";
  }
  return "unknown";
}

std::string to_string(TimeScheme scheme) {
  switch (scheme) {
    case TimeScheme::backward_euler: return "backward_euler";
    case TimeScheme::crank_nicolson: return "crank_nicolson";
    case TimeScheme::explicit_euler: return "explicit_euler";
  }
  return "unknown";
}

void validate(const HeatProblemSpec& spec, int samples_per_direction) {
  if (spec.dimension != 3)
    throw ConfigError("only N = 3 is supported for surface problems (got N = " +
                      std::to_string(spec.dimension) + ")");
  const BoundCheck check = curvature_bound_check(
      spec.chart, SampleRegion::whole(spec.chart, samples_per_direction, samples_per_direction),
      spec.R);
  if (!check.pass) {
    std::ostringstream os;
    os << "curvature bound fails on " << spec.chart.label() << " with R = " << spec.R
       << ": sup R*max|k| = " << check.sup_scaled;
    throw DomainError(os.str());
  }
}

double initial_data(Problem problem, Region region) {
  const bool plus = region == Region::omega_plus;
  const bool minus = region == Region::omega_minus;
  switch (problem) {
    case Problem::cauchy_sum: return (plus || minus) ? 1.0 : 0.0;
    case Problem::cauchy_diff: return plus ? 1.0 : (minus ? -1.0 : 0.0);
    case Problem::aux_plus: return plus ? 1.0 : 0.0;
    case Problem::aux_minus: return minus ? 1.0 : 0.0;
    default: throw ConfigError(to_string(problem) + " is not a Cauchy problem");
  }
}

TemperatureField::TemperatureField(std::string id, Provenance provenance, Range range,
                                   Evaluator evaluator, Sampler sampler)
    : id_(std::move(id)),
      provenance_(provenance),
      range_(range),
      evaluator_(std::move(evaluator)),
      sampler_(std::move(sampler)) {}

double TemperatureField::sample(const Vec3& p, double t, RandomStream& rng) const {
  if (sampler_) return sampler_(p, t, rng);
  return evaluator_(p, t).value;
}

TemperatureField constant_field(double value) {
  std::ostringstream os;
  os << "constant(" << value << ")";
  TemperatureField f(os.str(), Provenance::closed_form, {value, value},
                     [value](const Vec3&, double) { return Estimate{value, 0.0, true}; });
  f.constant = value;
  return f;
}

namespace {

std::string field_id(const HeatProblemSpec& spec) {
  std::ostringstream os;
  os << to_string(spec.problem) << "@" << spec.chart.label() << ",R=" << spec.R;
  return os.str();
}

TemperatureField::Range range_of(Problem problem) {
  return is_signed(problem) ? TemperatureField::Range{-1.0, 1.0} : TemperatureField::Range{0.0, 1.0};
}

void tag(TemperatureField& f, const HeatProblemSpec& spec) {
  f.problem = spec.problem;
  f.surface = spec.chart.label();
  f.R = spec.R;
}

BoundaryValues boundary_values(Problem problem) {
  return problem == Problem::ibvp_pm ? BoundaryValues{1.0, -1.0} : BoundaryValues{1.0, 1.0};
}

// Closed forms on the plane, as functions of the signed height.
std::function<double(double, double)> planar_profile(Problem problem, double R) {
  switch (problem) {
    case Problem::aux_plus: return [R](double h, double t) { return halfspace_oracle(R - h, t); };
    case Problem::aux_minus: return [R](double h, double t) { return halfspace_oracle(R + h, t); };
    case Problem::cauchy_sum:
      return [R](double h, double t) { return halfspace_oracle(R - h, t) + halfspace_oracle(R + h, t); };
    case Problem::cauchy_diff:
      return [R](double h, double t) { return halfspace_oracle(R - h, t) - halfspace_oracle(R + h, t); };
    case Problem::aux_plus_dirichlet:
      return [R](double h, double t) { return halfspace_dirichlet(R - h, t); };
    case Problem::aux_minus_dirichlet:
      return [R](double h, double t) { return halfspace_dirichlet(R + h, t); };
    default: throw ConfigError("no planar closed form for " + to_string(problem));
  }
}

std::function<double(double, double)> radial_profile(Problem problem, double rho, double R) {
  const double outer = rho + R, inner = rho - R;
  auto plus = [outer](double r, double t) {
    return ball_radial_oracle(r, outer, t, BallSide::outside).value;
  };
  auto minus = [inner](double r, double t) {
    return ball_radial_oracle(r, inner, t, BallSide::inside).value;
  };
  switch (problem) {
    case Problem::aux_plus: return plus;
    case Problem::aux_minus: return minus;
    case Problem::cauchy_sum: return [=](double r, double t) { return plus(r, t) + minus(r, t); };
    case Problem::cauchy_diff: return [=](double r, double t) { return plus(r, t) - minus(r, t); };
    case Problem::aux_plus_dirichlet:
      return [outer](double r, double t) { return ball_interior_dirichlet(r, outer, t); };
    case Problem::aux_minus_dirichlet:
      return [inner](double r, double t) { return ball_exterior_dirichlet(r, inner, t); };
    default: throw ConfigError("no radial reduction for " + to_string(problem));
  }
}

TemperatureField kernel_quadrature_field(const HeatProblemSpec& spec, const CauchyQuadrature& quad) {
  const HeatProblemSpec s = spec;
  auto eval = [s, quad](const Vec3& p, double t) { return cauchy_solution(s, p, t, quad); };
  auto draw = [s](const Vec3& p, double t, RandomStream& rng) {
    if (!(t > 0.0)) throw DomainError("time must be positive");
    const double scale = std::sqrt(2.0 * t);
    const Vec3 delta = scale * Vec3(rng.normal(), rng.normal(), rng.normal());
    const double a = initial_data(s.problem, classify_point(p + delta, s.chart, s.R, s.projection));
    const double b = initial_data(s.problem, classify_point(p - delta, s.chart, s.R, s.projection));
    return 0.5 * (a + b);
  };
  TemperatureField f(field_id(spec), Provenance::kernel_quadrature, range_of(spec.problem), eval, draw);
  f.diagnostics["samples"] = static_cast<double>(quad.samples);
  f.diagnostics["seed"] = static_cast<double>(quad.seed);
  return f;
}

}  // namespace

TemperatureField make_field(const HeatProblemSpec& spec, const FieldOptions& options) {
  validate(spec);
  if (spec.chart.orientation() < 0.0)
    throw ConfigError("heat problems require a chart in its natural orientation");
  const SurfaceKind kind = spec.chart.kind();
  const Problem problem = spec.problem;
  const Vec3 origin = spec.chart.origin();

  auto need_times = [&] {
    if (options.times.empty()) throw ConfigError("IBVP solvers need at least one output time");
  };

  if (family_of(problem) == Family::cauchy || problem == Problem::aux_plus_dirichlet ||
      problem == Problem::aux_minus_dirichlet) {
    const bool reducible = kind == SurfaceKind::plane || kind == SurfaceKind::sphere;
    const bool dirichlet_aux = family_of(problem) == Family::ibvp;
    if (reducible && (!options.force_quadrature || dirichlet_aux)) {
      if (kind == SurfaceKind::plane) {
        PlanarProfile profile{origin, Vec3::UnitZ(), planar_profile(problem, spec.R), {-spec.R, spec.R}};
        auto eval = [profile](const Vec3& p, double t) {
          return Estimate{profile.value((p - profile.origin).dot(profile.normal), t), 0.0, true};
        };
        TemperatureField f(field_id(spec), Provenance::closed_form, range_of(problem), eval);
        f.planar = profile;
        tag(f, spec);
        return f;
      }
      const double rho = std::get<SphereParams>(spec.chart.params()).radius;
      RadialProfile profile{origin, radial_profile(problem, rho, spec.R), {rho - spec.R, rho + spec.R}};
      auto eval = [profile](const Vec3& p, double t) {
        return Estimate{profile.value((p - profile.center).norm(), t), 1e-12, true};
      };
      TemperatureField f(field_id(spec),
                         dirichlet_aux ? Provenance::closed_form : Provenance::kernel_quadrature,
                         range_of(problem), eval);
      f.radial = profile;
      tag(f, spec);
      return f;
    }
    if (dirichlet_aux)
      throw ConfigError("auxiliary Dirichlet fields are only available for plane and sphere");
    TemperatureField f = kernel_quadrature_field(spec, options.quadrature);
    tag(f, spec);
    return f;
  }

  need_times();
  const BoundaryValues values = boundary_values(problem);
  TemperatureField f = [&] {
    switch (kind) {
      case SurfaceKind::plane:
        return solve_ibvp_slab(spec.R, values, options.times, options.line, options.stepping, origin);
      case SurfaceKind::sphere:
        return solve_ibvp_radial(std::get<SphereParams>(spec.chart.params()).radius, spec.R, values,
                                 options.times, options.line, options.stepping, 3, origin);
      default: {
        TimeStepping stepping = options.stepping;
        if (stepping.scheme == TimeScheme::crank_nicolson) stepping.scheme = TimeScheme::backward_euler;
        return solve_ibvp_3d(spec.chart, spec.R, values, options.grid, options.times, stepping,
                             spec.projection);
      }
    }
  }();
  tag(f, spec);
  f.rename(field_id(spec));
  return f;
}

}  // namespace isotherm
