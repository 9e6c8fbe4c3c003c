#include <array>
#include <cmath>
#include <numbers>

#include "isotherm/errors.hpp"
#include "isotherm/heat.hpp"

namespace isotherm {

using std::numbers::pi;

namespace {
void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
}
}  // namespace

double halfspace_oracle(double d, double t) {
  require_time(t);
  return 0.5 * erfc(d / (2.0 * std::sqrt(t)));
}

double halfspace_dirichlet(double d, double t) {
  require_time(t);
  if (d <= 0.0) return 1.0;
  return erfc(d / (2.0 * std::sqrt(t)));
}

Estimate ball_radial_oracle(double r, double ball_radius, double t, BallSide side) {
  require_time(t);
  if (r < 0.0) throw DomainError("radial coordinate must be non-negative");
  if (!(ball_radius > 0.0)) throw DomainError("ball radius must be positive");

  const double sq = std::sqrt(t);
  const double norm = 1.0 / std::sqrt(4.0 * pi * t);
  // Kernel averaged over the sphere |y| = q, times its area, seen from |x| = r.
  auto shell = [&](double q) {
    if (r < 1e-9 * sq) return norm * (q * q / t) * std::exp(-q * q / (4.0 * t));
    const double a = (q - r) * (q - r) / (4.0 * t);
    return -norm * (q / r) * std::exp(-a) * std::expm1(-q * r / t);
  };
  // Beyond 16 sqrt(t) from the peak the shell weight is below e^-64.
  const double width = 16.0 * sq;
  double lo = side == BallSide::inside ? 0.0 : ball_radius;
  double hi = side == BallSide::inside ? ball_radius : r + width;
  lo = std::max(lo, r - width);
  hi = std::min(hi, r + width);
  if (!(hi > lo)) return {0.0, 0.0, true};
  const std::array<double, 1> peak{r};
  return integrate(shell, lo, hi, peak, 1e-11);
}

double ball_exterior_dirichlet(double r, double s, double t) {
  require_time(t);
  if (r <= s) return 1.0;
  return (s / r) * erfc((r - s) / (2.0 * std::sqrt(t)));
}

double ball_interior_dirichlet(double r, double s, double t) {
  require_time(t);
  if (r >= s) return 1.0;
  if (r < 0.0) throw DomainError("radial coordinate must be non-negative");
  if (t > 0.25 * s * s) {
    // eigenfunction expansion; converges like exp(-n^2 pi^2 / 4) here
    double sum = 0.0;
    for (int n = 1; n < 200; ++n) {
      const double decay = std::exp(-n * n * pi * pi * t / (s * s));
      const double k = n * pi / s;
      const double shape = r < 1e-12 * s ? k : std::sin(k * r) / r;
      sum += ((n % 2 == 0) ? 1.0 : -1.0) / n * shape * decay;
      if (decay < 1e-18) break;
    }
    return 1.0 + (2.0 * s / pi) * sum;
  }
  // method of images for w = r u on (0, s)
  const double c = 2.0 * std::sqrt(t);
  double sum = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double a = (2 * k + 1) * s;
    double term;
    if (r < 1e-8 * s)
      term = s * 4.0 / (c * std::sqrt(pi)) * std::exp(-(a * a) / (c * c));
    else
      term = (s / r) * (erfc((a - r) / c) - erfc((a + r) / c));
    sum += term;
    if (std::abs(term) < 1e-18 && a - r > 10.0 * c) break;
  }
  return sum;
}

}  // namespace isotherm
