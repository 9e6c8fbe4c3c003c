#include <array>
#include <cmath>
#include <vector>

#include "isotherm/errors.hpp"
#include "isotherm/heat.hpp"

namespace isotherm {

namespace {
// strata are split round-robin into this many substreams
constexpr std::size_t kChunks = 16;

struct StratumSums {
  double mean_sum = 0.0;  // sum over strata of stratum means
  double var_sum = 0.0;   // sum over strata of (sample variance / k)
};
}  // namespace

Estimate cauchy_solution(const HeatProblemSpec& spec, const Vec3& point, double t,
                         const CauchyQuadrature& quadrature) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("time must be positive and finite");
  if (family_of(spec.problem) != Family::cauchy)
    throw ConfigError(to_string(spec.problem) + " is not a Cauchy problem");
  if (spec.dimension != 3) throw ConfigError("kernel quadrature is implemented for N = 3");
  if (quadrature.samples < 16) throw ConfigError("kernel quadrature needs at least 16 samples");

  // m^3 strata of the unit cube, k >= 2 antithetic pairs per stratum, mapped
  // to the Gaussian through the inverse normal CDF.
  const auto m = static_cast<std::size_t>(std::max(1.0, std::floor(std::cbrt(quadrature.samples / 2.0))));
  const std::size_t strata = m * m * m;
  const std::size_t k = std::max<std::size_t>(2, quadrature.samples / strata);
  const double scale = std::sqrt(2.0 * t);

  const std::array<double, 4> keys{point.x(), point.y(), point.z(), t};
  const std::uint64_t key = stream_key(quadrature.seed, keys);

  std::vector<StratumSums> partial(kChunks);
  parallel_for(kChunks, quadrature.workers, [&](std::size_t chunk) {
    RandomStream rng(key, chunk);
    StratumSums acc;
    for (std::size_t s = chunk; s < strata; s += kChunks) {
      const std::size_t i = s / (m * m), j = (s / m) % m, l = s % m;
      double mean = 0.0, m2 = 0.0;
      for (std::size_t n = 0; n < k; ++n) {
        const Vec3 z(normal_quantile((i + rng.uniform()) / m), normal_quantile((j + rng.uniform()) / m),
                     normal_quantile((l + rng.uniform()) / m));
        const Vec3 delta = scale * z;
        const double a = initial_data(spec.problem, classify_point(point + delta, spec.chart, spec.R, spec.projection));
        const double b = initial_data(spec.problem, classify_point(point - delta, spec.chart, spec.R, spec.projection));
        const double x = 0.5 * (a + b);
        const double d = x - mean;
        mean += d / static_cast<double>(n + 1);
        m2 += d * (x - mean);
      }
      acc.mean_sum += mean;
      acc.var_sum += m2 / static_cast<double>(k - 1) / static_cast<double>(k);
    }
    partial[chunk] = acc;
  });

  StratumSums total;
  for (const auto& p : partial) {
    total.mean_sum += p.mean_sum;
    total.var_sum += p.var_sum;
  }
  const double S = static_cast<double>(strata);
  Estimate out;
  out.value = total.mean_sum / S;
  out.error = std::sqrt(total.var_sum) / S;
  out.converged = 3.0 * out.error <= quadrature.tolerance;
  return out;
}

}  // namespace isotherm
