#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "isotherm/errors.hpp"
#include "isotherm/heat.hpp"

namespace isotherm {

namespace {

bool same_setup(const TemperatureField& a, const TemperatureField& b) {
  if (a.surface.empty() || b.surface.empty()) return true;
  return a.surface == b.surface && (a.R == b.R || (std::isnan(a.R) && std::isnan(b.R)));
}

}  // namespace

ComparisonReport comparison_bounds_check(const TemperatureField& u,
                                         const TemperatureField& u_plus,
                                         const TemperatureField& u_minus,
                                         std::span<const Vec3> samples,
                                         std::span<const double> times, Problem problem) {
  if (!same_setup(u, u_plus) || !same_setup(u, u_minus)) {
    std::ostringstream os;
    os << "comparison fields disagree on the setup: " << u.id() << ", " << u_plus.id() << ", "
       << u_minus.id();
    throw ConfigError(os.str());
  }
  bool signed_family;
  switch (problem) {
    case Problem::ibvp_ones:
    case Problem::cauchy_sum: signed_family = false; break;
    case Problem::ibvp_pm:
    case Problem::cauchy_diff: signed_family = true; break;
    default: throw ConfigError("no comparison sandwich for " + to_string(problem));
  }

  ComparisonReport report;
  for (double t : times)
    for (const Vec3& p : samples) {
      const double a = u.value(p, t).value;
      const double up = u_plus.value(p, t).value;
      const double um = u_minus.value(p, t).value;
      double lower, upper;
      if (signed_family) {
        lower = std::max(-um, up - 2.0 * um);
        upper = std::min(up, 2.0 * up - um);
      } else {
        lower = std::max(up, um);
        upper = up + um;
      }
      const double violation = std::max(lower - a, a - upper);
      ++report.evaluations;
      if (violation > report.max_violation) {
        report.max_violation = violation;
        report.worst_point = p;
        report.worst_time = t;
      }
    }
  return report;
}

VaradhanTable varadhan_check(const TemperatureField& aux, std::span<const VaradhanProbe> probes,
                             std::span<const double> times) {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] < times[i - 1]))
      throw ConfigError("Varadhan times must decrease toward 0");
  VaradhanTable table;
  for (const VaradhanProbe& probe : probes) {
    double usable = std::numeric_limits<double>::quiet_NaN();
    for (double t : times) {
      const double u = aux.value(probe.point, t).value;
      if (!(u >= DBL_MIN)) {
        table.underflow = true;
        break;
      }
      usable = t;
      VaradhanRow row;
      row.point = probe.point;
      row.t = t;
      row.log_scaled = -4.0 * t * std::log(u);
      row.dist2 = probe.distance * probe.distance;
      row.ratio = row.dist2 > 0.0 ? row.log_scaled / row.dist2 : row.log_scaled;
      table.rows.push_back(row);
    }
    table.smallest_usable_t.push_back(usable);
  }
  return table;
}

double distance_to_offset(const Vec3& p, const SurfaceChart& chart, double R, OffsetSide side,
                          const ProjectionOptions& projection) {
  const double d = signed_distance(p, chart, projection).distance;
  return std::abs(side == OffsetSide::plus ? R - d : R + d);
}

}  // namespace isotherm
