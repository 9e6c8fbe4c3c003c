#include <algorithm>
#include <cmath>
#include <sstream>

#include "isotherm/errors.hpp"
#include "isotherm/heat.hpp"

namespace isotherm {

namespace {

void check_times(std::span<const double> times) {
  if (times.empty()) throw ConfigError("at least one output time is required");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev) || !std::isfinite(t))
      throw ConfigError("output times must be positive, finite and strictly increasing");
    prev = t;
  }
}

// Solves the tridiagonal system sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i].
void thomas(std::vector<double>& sub, std::vector<double>& diag, std::vector<double>& sup,
            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

double LineSolution::value(double x, double t) const {
  if (!(t >= 0.0) || t > times.back() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time " << t << " outside the solved horizon [0, " << times.back() << "]";
    throw DomainError(os.str());
  }
  const std::size_t cells = values.front().size() - 1;
  const double h = (hi - lo) / static_cast<double>(cells);
  const double s = std::clamp((x - lo) / h, 0.0, static_cast<double>(cells));
  const auto i = std::min(static_cast<std::size_t>(s), cells - 1);
  const double fx = s - static_cast<double>(i);
  auto at = [&](std::size_t row) { return (1.0 - fx) * values[row][i] + fx * values[row][i + 1]; };

  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end()) it = std::prev(times.end());
  const auto row = static_cast<std::size_t>(it - times.begin());
  if (row == 0 || std::abs(*it - t) <= 1e-12 * std::max(1.0, t)) return at(row);
  const double t0 = times[row - 1], t1 = times[row];
  const double ft = (t - t0) / (t1 - t0);
  return (1.0 - ft) * at(row - 1) + ft * at(row);
}

LineSolution solve_line(double lo, double hi, double weight_exponent, double value_lo,
                        double value_hi, int cells, std::span<const double> times,
                        const TimeStepping& stepping) {
  check_times(times);
  if (!(hi > lo)) throw ConfigError("empty 1-D domain");
  if (cells < 4) throw ConfigError("1-D solver needs at least 4 cells");
  if (weight_exponent != 0.0 && !(lo > 0.0))
    throw ConfigError("radial solver needs a positive inner radius");

  const auto M = static_cast<std::size_t>(cells);
  const double h = (hi - lo) / static_cast<double>(M);
  // conservative form: (1/w) d/dx (w du/dx), w = x^weight_exponent
  auto w = [&](double x) { return weight_exponent == 0.0 ? 1.0 : std::pow(x, weight_exponent); };
  std::vector<double> a(M + 1, 0.0), c(M + 1, 0.0);
  for (std::size_t i = 1; i < M; ++i) {
    const double x = lo + h * static_cast<double>(i);
    a[i] = w(x - 0.5 * h) / (w(x) * h * h);
    c[i] = w(x + 0.5 * h) / (w(x) * h * h);
  }

  std::vector<double> u(M + 1, 0.0);
  u.front() = value_lo;
  u.back() = value_hi;

  LineSolution out;
  out.lo = lo;
  out.hi = hi;
  out.times.push_back(0.0);
  out.values.push_back(u);
  out.dt = std::min(stepping.max_dt, times.front() / 20.0);

  if (stepping.scheme == TimeScheme::explicit_euler) {
    const double limit = h * h / (2.0 * 3.0);
    if (out.dt > limit * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "explicit step " << out.dt << " violates the CFL limit h^2/(2N) = " << limit;
      throw EvaluationError(os.str());
    }
  }

  const std::size_t n = M - 1;
  std::vector<double> sub(n), diag(n), sup(n), rhs(n);
  auto step = [&](double dt, double theta) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = k + 1;
      const double lu = a[i] * u[i - 1] - (a[i] + c[i]) * u[i] + c[i] * u[i + 1];
      rhs[k] = u[i] + (1.0 - theta) * dt * lu;
      sub[k] = -theta * dt * a[i];
      sup[k] = -theta * dt * c[i];
      diag[k] = 1.0 + theta * dt * (a[i] + c[i]);
    }
    // known boundary values move to the right-hand side
    rhs.front() -= sub.front() * value_lo;
    rhs.back() -= sup.back() * value_hi;
    if (theta == 0.0) {
      for (std::size_t k = 0; k < n; ++k) u[k + 1] = rhs[k];
    } else {
      thomas(sub, diag, sup, rhs);
      for (std::size_t k = 0; k < n; ++k) u[k + 1] = rhs[k];
    }
    ++out.steps;
  };

  const double theta = stepping.scheme == TimeScheme::backward_euler   ? 1.0
                       : stepping.scheme == TimeScheme::crank_nicolson ? 0.5
                                                                       : 0.0;
  std::size_t global_step = 0;
  double t_prev = 0.0;
  for (double t_out : times) {
    const auto steps = static_cast<std::size_t>(std::ceil((t_out - t_prev) / out.dt - 1e-9));
    const double dt = (t_out - t_prev) / static_cast<double>(std::max<std::size_t>(steps, 1));
    for (std::size_t s = 0; s < std::max<std::size_t>(steps, 1); ++s, ++global_step) {
      if (stepping.scheme == TimeScheme::crank_nicolson && global_step < 2) {
        // Rannacher start-up: damp the boundary/initial jump with implicit half steps
        step(0.5 * dt, 1.0);
        step(0.5 * dt, 1.0);
      } else {
        step(dt, theta);
      }
    }
    out.times.push_back(t_out);
    out.values.push_back(u);
    t_prev = t_out;
  }
  return out;
}

namespace {

TemperatureField line_field(std::string id, Provenance provenance, TemperatureField::Range range,
                            std::function<double(const Vec3&)> coordinate, LineSolution fine,
                            std::optional<LineSolution> coarse) {
  auto eval = [coordinate, fine, coarse](const Vec3& p, double t) {
    const double x = coordinate(p);
    const double v = fine.value(x, t);
    const double err = coarse ? std::abs(v - coarse->value(x, t)) : 0.0;
    return Estimate{v, err, true};
  };
  TemperatureField f(std::move(id), provenance, range, eval);
  f.diagnostics["cells"] = static_cast<double>(fine.values.front().size() - 1);
  f.diagnostics["dt"] = fine.dt;
  f.diagnostics["steps"] = static_cast<double>(fine.steps);
  return f;
}

}  // namespace

TemperatureField solve_ibvp_radial(double rho, double R, BoundaryValues values,
                                   std::span<const double> times, const LineGrid& grid,
                                   const TimeStepping& stepping, int dimension,
                                   const Vec3& center) {
  if (!(rho > R) || !(R > 0.0)) throw ConfigError("radial solver requires rho > R > 0");
  if (dimension < 2) throw ConfigError("radial solver requires N >= 2");
  const double expo = dimension - 1.0;
  LineSolution fine =
      solve_line(rho - R, rho + R, expo, values.minus, values.plus, grid.cells, times, stepping);
  std::optional<LineSolution> coarse;
  if (grid.estimate_error)
    coarse = solve_line(rho - R, rho + R, expo, values.minus, values.plus, grid.cells / 2, times,
                        stepping);
  const TemperatureField::Range range{std::min({0.0, values.plus, values.minus}),
                                      std::max({0.0, values.plus, values.minus})};
  std::ostringstream id;
  id << "radial-fd(rho=" << rho << ",R=" << R << ")";
  auto radius = [center](const Vec3& p) { return (p - center).norm(); };
  TemperatureField f = line_field(id.str(), Provenance::radial_fd, range, radius, fine, coarse);
  auto profile = [fine](double r, double t) { return fine.value(r, t); };
  f.radial = RadialProfile{center, profile, {rho - R, rho + R}};
  f.diagnostics["dimension"] = dimension;
  return f;
}

TemperatureField solve_ibvp_slab(double R, BoundaryValues values, std::span<const double> times,
                                 const LineGrid& grid, const TimeStepping& stepping,
                                 const Vec3& origin, const Vec3& normal) {
  if (!(R > 0.0)) throw ConfigError("slab solver requires R > 0");
  LineSolution fine = solve_line(-R, R, 0.0, values.minus, values.plus, grid.cells, times, stepping);
  std::optional<LineSolution> coarse;
  if (grid.estimate_error)
    coarse = solve_line(-R, R, 0.0, values.minus, values.plus, grid.cells / 2, times, stepping);
  const TemperatureField::Range range{std::min({0.0, values.plus, values.minus}),
                                      std::max({0.0, values.plus, values.minus})};
  std::ostringstream id;
  id << "slab-fd(R=" << R << ")";
  const Vec3 n = normal.normalized();
  auto height = [origin, n](const Vec3& p) { return (p - origin).dot(n); };
  TemperatureField f = line_field(id.str(), Provenance::slab_fd, range, height, fine, coarse);
  auto profile = [fine](double z, double t) { return fine.value(z, t); };
  f.planar = PlanarProfile{origin, n, profile, {-R, R}};
  return f;
}

}  // namespace isotherm
