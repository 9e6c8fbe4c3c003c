#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace isotherm {

/// A value with an absolute error estimate. `converged` is false when the
/// producing routine could not reach the requested tolerance.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Complementary error function (std::erfc).
double erfc(double x);

/// Inverse of the standard normal CDF on (0, 1).
double normal_quantile(double p);

/// Adaptive 15-point Gauss-Kronrod quadrature of f over [a, b].
Estimate integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-12);

/// Same, but splits [a, b] at the given interior points first. Points
/// outside (a, b) are ignored.
Estimate integrate(const std::function<double(double)>& f, double a, double b,
                   std::span<const double> breaks, double rel_tol = 1e-12);

// ---------------------------------------------------------------------------
// Random streams

std::uint64_t splitmix64(std::uint64_t x);

/// Hash-combine a seed with a list of doubles (bit patterns) into a stream id.
std::uint64_t stream_key(std::uint64_t seed, std::span<const double> keys);

/// xoshiro256** seeded through splitmix64. Identical keys reproduce identical
/// draws on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key);
  RandomStream(std::uint64_t key, std::uint64_t substream);

  std::uint64_t next();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();

 private:
  std::uint64_t s_[4];
};

/// Runs body(i) for i in [0, count) on at most `workers` threads. Each index
/// is visited exactly once; callers write into preallocated slots so the
/// reduction order never depends on scheduling.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace isotherm
