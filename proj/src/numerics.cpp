#include "isotherm/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace isotherm {

double erfc(double x) { return std::erfc(x); }

double normal_quantile(double p) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

Estimate integrate(const std::function<double(double)>& f, double a, double b,
                   double rel_tol) {
  if (!(b > a)) return {0.0, 0.0, true};
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 15, rel_tol, &err, &l1);
  const bool ok = std::isfinite(value) && err <= std::max(rel_tol * l1, 1e-300) * 10.0;
  return {value, err, ok};
}

Estimate integrate(const std::function<double(double)>& f, double a, double b,
                   std::span<const double> breaks, double rel_tol) {
  std::vector<double> knots{a};
  for (double x : breaks)
    if (x > a && x < b) knots.push_back(x);
  knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  Estimate total;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Estimate piece = integrate(f, knots[i], knots[i + 1], rel_tol);
    total.value += piece.value;
    total.error += piece.error;
    total.converged = total.converged && piece.converged;
  }
  return total;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::span<const double> keys) {
  std::uint64_t h = splitmix64(seed);
  for (double k : keys) {
    if (k == 0.0) k = 0.0;  // fold -0 into +0
    std::uint64_t bits = 0;
    std::memcpy(&bits, &k, sizeof bits);
    h = splitmix64(h ^ bits);
  }
  return h;
}

namespace {
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

RandomStream::RandomStream(std::uint64_t key) : RandomStream(key, 0) {}

RandomStream::RandomStream(std::uint64_t key, std::uint64_t substream) {
  std::uint64_t x = splitmix64(key ^ splitmix64(substream + 0x632be59bd9b4e019ULL));
  for (auto& s : s_) {
    x = splitmix64(x);
    s = x;
  }
}

std::uint64_t RandomStream::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform() {
  // 53 random bits, shifted by half an ulp so 0 is never returned.
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_quantile(uniform()); }

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t n_threads =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(workers, 1)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(n_threads);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        failures[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

}  // namespace isotherm
