#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "isotherm/content.hpp"
#include "isotherm/errors.hpp"

namespace isotherm {

using std::numbers::pi;

namespace {

constexpr std::size_t chunk_count = 16;

Estimate planar_content(const TemperatureField& field, const Vec3& center, double R, double t) {
  const PlanarProfile& prof = *field.planar;
  const double h0 = (center - prof.origin).dot(prof.normal);
  auto point = [&](double s) { return Vec3(center + s * prof.normal); };
  auto disc = [&](double s) { return pi * (R * R - s * s); };
  std::vector<double> breaks;
  for (double f : prof.fronts) breaks.push_back(f - h0);
  const Estimate q =
      integrate([&](double s) { return disc(s) * field.value(point(s), t).value; }, -R, R, breaks,
                1e-10);
  const Estimate e =
      integrate([&](double s) { return disc(s) * field.value(point(s), t).error; }, -R, R, breaks,
                1e-6);
  return {q.value, q.error + std::abs(e.value), q.converged};
}

Estimate radial_content(const TemperatureField& field, const Vec3& center, double R, double t) {
  const RadialProfile& prof = *field.radial;
  const Vec3 offset = center - prof.center;
  const double D = offset.norm();
  const Vec3 dir = D > 0.0 ? Vec3(offset / D) : Vec3::UnitX();
  // area of the sphere |y - c| = r lying inside B_R(center)
  auto area = [&](double r) {
    if (r <= R - D) return 4.0 * pi * r * r;
    return (pi * r / D) * (R * R - (r - D) * (r - D));
  };
  auto point = [&](double r) { return Vec3(prof.center + r * dir); };
  const double lo = std::max(0.0, D - R), hi = D + R;
  std::vector<double> breaks(prof.fronts);
  if (R - D > 0.0) breaks.push_back(R - D);
  std::sort(breaks.begin(), breaks.end());
  const Estimate q =
      integrate([&](double r) { return area(r) * field.value(point(r), t).value; }, lo, hi, breaks,
                1e-10);
  const Estimate e =
      integrate([&](double r) { return area(r) * field.value(point(r), t).error; }, lo, hi, breaks,
                1e-6);
  return {q.value, q.error + std::abs(e.value), q.converged};
}

Estimate monte_carlo_content(const TemperatureField& field, const Vec3& center, double R, double t,
                             const BallQuadrature& q) {
  const std::size_t m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(q.samples) / 2.0))));
  const std::size_t strata = m * m * m;
  const std::size_t k = std::max<std::size_t>(2, q.samples / strata);
  const std::array<double, 5> keys{center.x(), center.y(), center.z(), R, t};
  const std::uint64_t key = stream_key(q.seed, keys);

  std::vector<double> means(strata), vars(strata);
  parallel_for(chunk_count, q.workers, [&](std::size_t chunk) {
    RandomStream rng(key, chunk);
    for (std::size_t s = chunk; s < strata; s += chunk_count) {
      const std::size_t a = s / (m * m), b = (s / m) % m, c = s % m;
      double mean = 0.0, m2 = 0.0;
      for (std::size_t n = 0; n < k; ++n) {
        const double r = R * std::cbrt((a + rng.uniform()) / m);
        const double ct = -1.0 + 2.0 * (b + rng.uniform()) / m;
        const double ph = 2.0 * pi * (c + rng.uniform()) / m;
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        const Vec3 p = center + r * Vec3(st * std::cos(ph), st * std::sin(ph), ct);
        const double x = field.sample(p, t, rng);
        const double delta = x - mean;
        mean += delta / static_cast<double>(n + 1);
        m2 += delta * (x - mean);
      }
      means[s] = mean;
      vars[s] = m2 / static_cast<double>(k - 1);
    }
  });
  double sum = 0.0, var = 0.0;
  for (std::size_t s = 0; s < strata; ++s) {
    sum += means[s];
    var += vars[s] / static_cast<double>(k);
  }
  const double volume = 4.0 / 3.0 * pi * R * R * R;
  const double S = static_cast<double>(strata);
  const double error = volume * std::sqrt(var) / S;
  return {volume * sum / S, error, true};
}

void check_decreasing(std::span<const double> times) {
  if (times.empty()) throw ConfigError("empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0)) throw ConfigError("times must be positive");
    if (i > 0 && !(times[i] < times[i - 1])) throw ConfigError("times must be strictly decreasing");
  }
}

}  // namespace

Estimate ball_heat_content(const TemperatureField& field, const Vec3& center, double R, double t,
                           const BallQuadrature& quadrature) {
  if (!(t > 0.0)) throw DomainError("time must be positive");
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  Estimate e;
  if (field.constant && !quadrature.force_monte_carlo)
    e = {*field.constant * 4.0 / 3.0 * pi * R * R * R, 0.0, true};
  else if (field.planar && !quadrature.force_monte_carlo)
    e = planar_content(field, center, R, t);
  else if (field.radial && !quadrature.force_monte_carlo)
    e = radial_content(field, center, R, t);
  else
    e = monte_carlo_content(field, center, R, t, quadrature);
  e.converged = e.converged && e.error <= quadrature.tolerance;
  return e;
}

std::vector<double> geometric_times(double t0, int count, double ratio) {
  if (!(t0 > 0.0) || count < 1 || !(ratio > 0.0 && ratio < 1.0))
    throw ConfigError("geometric time grid needs t0 > 0, count >= 1, 0 < ratio < 1");
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(t0 * std::pow(ratio, k));
  return out;
}

HeatContentSeries heat_content_series(const TemperatureField& field, const Vec3& center, double R,
                                      std::span<const double> times,
                                      const BallQuadrature& quadrature) {
  check_decreasing(times);
  HeatContentSeries s;
  s.field = field.id();
  s.center = center;
  s.R = R;
  s.times.assign(times.begin(), times.end());
  for (double t : times) s.values.push_back(ball_heat_content(field, center, R, t, quadrature));
  return s;
}

double halfspace_ball_content(double R, double t, int dimension, Family family) {
  if (!(R > 0.0) || !(t > 0.0)) throw DomainError("R and t must be positive");
  if (dimension < 2) throw ConfigError("dimension must be at least 2");
  const double k = dimension - 1.0;
  const double omega = std::pow(pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
  const double scale = family == Family::cauchy ? 0.5 : 1.0;
  const double c = 2.0 * std::sqrt(t);
  auto f = [&](double z) {
    return omega * std::pow(std::max(0.0, R * R - z * z), k / 2.0) * scale * erfc((R - z) / c);
  };
  const double lo = std::max(-R, R - 20.0 * c);
  return integrate(f, lo, R, 1e-12).value;
}

Calibration calibrate_cN(double R, int dimension, Family family, std::span<const double> times) {
  check_decreasing(times);
  HeatContentSeries series;
  series.field = std::string("halfspace-") + (family == Family::cauchy ? "cauchy" : "ibvp");
  series.R = R;
  series.times.assign(times.begin(), times.end());
  for (double t : times)
    series.values.push_back({halfspace_ball_content(R, t, dimension, family), 0.0, true});
  Calibration c;
  c.family = family;
  c.dimension = dimension;
  c.R = R;
  c.fit = fit_power_law(series);
  c.amplitude = extrapolate_amplitude(series, (dimension + 1) / 4.0);
  const double scale = std::pow(R, (dimension - 1) / 2.0);
  c.cN = c.amplitude.value / scale;
  c.amplitude.error = std::abs(c.amplitude.error);
  return c;
}

double predicted_amplitude(const CurvaturePair& offset_pair, double R, double cN) {
  if (!(R > 0.0)) throw DomainError("R must be positive");
  const double f1 = 1.0 / R - offset_pair.k1(), f2 = 1.0 / R - offset_pair.k2();
  if (!(f1 * R > 1e-12) || !(f2 * R > 1e-12)) {
    std::ostringstream os;
    os << "1/R - k must be positive for both offset curvatures (got " << f1 << ", " << f2 << ")";
    throw DomainError(os.str());
  }
  const double value = cN / std::sqrt(f1 * f2);
  if (!std::isfinite(value)) throw DomainError("predicted amplitude overflows");
  return value;
}

BalanceReport balance_law_report(const TemperatureField& field, std::span<const Vec3> centers,
                                 double R, std::span<const double> times,
                                 const BallQuadrature& quadrature, double tolerance) {
  if (centers.size() < 2) throw ConfigError("the balance law needs at least two centers");
  if (times.empty()) throw ConfigError("empty time grid");
  BalanceReport report;
  report.field = field.id();
  report.R = R;
  report.centers.assign(centers.begin(), centers.end());

  const bool reduced = !quadrature.force_monte_carlo &&
                       (field.constant || field.planar || field.radial);
  BallQuadrature inner = quadrature;
  if (reduced) inner.workers = 1;

  for (double t : times) {
    BalanceRow row;
    row.t = t;
    row.contents.resize(centers.size());
    row.traces.resize(centers.size());
    auto one = [&](std::size_t i) {
      row.contents[i] = ball_heat_content(field, centers[i], R, t, inner);
      row.traces[i] = field.value(centers[i], t);
    };
    if (reduced)
      parallel_for(centers.size(), quadrature.workers, one);
    else
      for (std::size_t i = 0; i < centers.size(); ++i) one(i);

    std::size_t imax = 0, imin = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      sum += row.contents[i].value;
      if (row.contents[i].value > row.contents[imax].value) imax = i;
      if (row.contents[i].value < row.contents[imin].value) imin = i;
    }
    row.mean = sum / static_cast<double>(centers.size());
    const double scale = std::max(std::abs(row.mean), spread_floor);
    row.spread = (row.contents[imax].value - row.contents[imin].value) / scale;
    row.noise = std::hypot(row.contents[imax].error, row.contents[imin].error) / scale;
    row.significant = row.spread > 3.0 * row.noise;
    row.resolved = 3.0 * row.noise <= tolerance;

    auto [lo, hi] = std::minmax_element(row.traces.begin(), row.traces.end(),
                                        [](const Estimate& a, const Estimate& b) {
                                          return a.value < b.value;
                                        });
    report.max_trace_spread = std::max(report.max_trace_spread, hi->value - lo->value);
    for (const Estimate& e : row.traces)
      report.max_abs_trace = std::max(report.max_abs_trace, std::abs(e.value));
    report.max_spread = std::max(report.max_spread, row.spread);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace isotherm
