#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "isotherm/content.hpp"
#include "isotherm/errors.hpp"

namespace isotherm {

namespace {

struct Usable {
  std::vector<double> t, q;
};

Usable usable_points(const HeatContentSeries& series, double max_relative_error) {
  Usable u;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const Estimate& e = series.values[i];
    if (e.value > 0.0 && e.error <= max_relative_error * e.value) {
      u.t.push_back(series.times[i]);
      u.q.push_back(e.value);
    }
  }
  if (u.t.size() < 4) {
    std::ostringstream os;
    os << "power-law fit needs at least 4 usable points, " << series.field << " has "
       << u.t.size() << " of " << series.times.size();
    throw EvaluationError(os.str());
  }
  return u;
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw ConfigError("times and values differ in length");
  if (times.size() < 4) throw EvaluationError("power-law fit needs at least 4 usable points");
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(times[i] > 0.0) || !(values[i] > 0.0))
      throw EvaluationError("power-law fit needs positive times and values");
    A(i, 0) = 1.0;
    A(i, 1) = std::log(times[i]);
    y(i) = std::log(values[i]);
  }
  const Eigen::Vector2d beta = A.colPivHouseholderQr().solve(y);
  PowerLawFit fit;
  fit.amplitude = std::exp(beta(0));
  fit.exponent = beta(1);
  fit.residual = (A * beta - y).squaredNorm();
  fit.t_min = *std::min_element(times.begin(), times.end());
  fit.t_max = *std::max_element(times.begin(), times.end());
  fit.points = times.size();
  return fit;
}

PowerLawFit fit_power_law(const HeatContentSeries& series, double max_relative_error) {
  const Usable u = usable_points(series, max_relative_error);
  return fit_power_law(u.t, u.q);
}

Estimate extrapolate_amplitude(const HeatContentSeries& series, double exponent,
                               double max_relative_error) {
  const Usable u = usable_points(series, max_relative_error);
  const auto n = static_cast<Eigen::Index>(u.t.size());
  auto fit = [&](int degree) {
    Eigen::MatrixXd A(n, degree + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = std::sqrt(u.t[i]);
      for (int d = 0; d <= degree; ++d) A(i, d) = std::pow(s, d);
      y(i) = u.q[i] / std::pow(u.t[i], exponent);
    }
    return Eigen::VectorXd(A.colPivHouseholderQr().solve(y))(0);
  };
  const double quadratic = fit(2);
  const double linear = fit(1);
  return {quadratic, std::abs(quadratic - linear), true};
}

}  // namespace isotherm
