#include <cfloat>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "isotherm/errors.hpp"
#include "isotherm/heat.hpp"
#include "oracles.hpp"

using namespace isotherm;
using doctest::Approx;
using std::numbers::pi;

namespace {

HeatProblemSpec spec_of(Problem problem, const SurfaceParams& params, double R) {
  return HeatProblemSpec{problem, make_surface(params), R};
}

double line_error(int cells, double t) {
  const std::vector<double> times{t};
  const LineSolution s =
      solve_line(-1.0, 1.0, 0.0, 1.0, 1.0, cells, times, {TimeScheme::crank_nicolson, 1e-4});
  double worst = 0.0;
  for (double z : {-0.6, -0.2, 0.0, 0.3, 0.7}) worst = std::max(worst, std::abs(s.value(z, t) - oracle::slab_ones(z, 1.0, t)));
  return worst;
}

}  // namespace

TEST_SUITE("heat") {
  TEST_CASE("complementary error function") {
    CHECK(isotherm::erfc(0.0) == 1.0);
    CHECK(isotherm::erfc(1.0) == Approx(0.15729920705028513).epsilon(1e-15));
    CHECK(isotherm::erfc(-1.0) == Approx(1.8427007929497148).epsilon(1e-15));
    CHECK(isotherm::erfc(5.0) == Approx(1.5374597944280349e-12).epsilon(1e-13));
    CHECK(isotherm::erfc(27.0) > 0.0);
    CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("half-space oracles") {
    CHECK(halfspace_oracle(1.0, 0.25) == Approx(0.07864960352514257).epsilon(1e-14));
    CHECK(halfspace_oracle(0.0, 0.3) == 0.5);
    CHECK(halfspace_oracle(-1.0, 0.25) + halfspace_oracle(1.0, 0.25) == Approx(1.0).epsilon(1e-15));
    CHECK(halfspace_dirichlet(1.0, 0.25) == Approx(2.0 * 0.07864960352514257).epsilon(1e-14));
    CHECK(halfspace_dirichlet(-0.5, 0.25) == 1.0);
    CHECK_THROWS_AS(halfspace_oracle(1.0, 0.0), DomainError);
  }

  TEST_CASE("ball oracles against closed forms") {
    for (double r : {0.0, 0.5, 1.7, 2.0, 2.3, 4.0})
      for (double t : {1e-3, 0.05, 0.5}) {
        CAPTURE(r);
        CAPTURE(t);
        const double exact = r == 0.0 ? std::erf(1.0 / std::sqrt(t)) - 2.0 / std::sqrt(pi * t) * std::exp(-1.0 / t)
                                      : oracle::ball_mass(r, 2.0, t);
        CHECK(std::abs(ball_radial_oracle(r, 2.0, t).value - exact) < 1e-10);
        CHECK(std::abs(ball_radial_oracle(r, 2.0, t, BallSide::outside).value - (1.0 - exact)) < 1e-10);
      }
    for (double r : {0.3, 1.5, 2.9})
      for (double t : {0.05, 0.5, 3.0}) {
        CAPTURE(r);
        CAPTURE(t);
        CHECK(ball_interior_dirichlet(r, 3.0, t) ==
              Approx(oracle::ball_interior_series(r, 3.0, t)).epsilon(1e-9));
      }
    CHECK(ball_exterior_dirichlet(2.0, 1.0, 0.25) == Approx(0.5 * isotherm::erfc(1.0)).epsilon(1e-15));
    CHECK(ball_exterior_dirichlet(0.5, 1.0, 0.25) == 1.0);
  }

  TEST_CASE("kernel quadrature agrees with the radial oracle") {
    const HeatProblemSpec spec = spec_of(Problem::aux_plus, SphereParams{2.0}, 1.0);
    for (const Vec3& p : {Vec3(3.0, 1.0, 0.5), Vec3(0.0, 2.2, 0.0), Vec3(1.0, 1.0, 1.0)}) {
      const double t = 0.1;
      const Estimate mc = cauchy_solution(spec, p, t, {std::size_t{1} << 14});
      const double exact = ball_radial_oracle(p.norm(), 3.0, t, BallSide::outside).value;
      CAPTURE(p.transpose());
      CHECK(mc.error > 0.0);
      CHECK(std::abs(mc.value - exact) <= 3.0 * mc.error + 1e-12);
    }
  }

  TEST_CASE("kernel quadrature superposes exactly and ignores the worker count") {
    const SurfaceParams torus = TorusParams{1.0, 3.0};
    const Vec3 p(3.2, 0.5, 0.1);
    const double t = 0.02;
    const CauchyQuadrature q{std::size_t{1} << 12};
    const double plus = cauchy_solution(spec_of(Problem::aux_plus, torus, 0.4), p, t, q).value;
    const double minus = cauchy_solution(spec_of(Problem::aux_minus, torus, 0.4), p, t, q).value;
    const Estimate sum = cauchy_solution(spec_of(Problem::cauchy_sum, torus, 0.4), p, t, q);
    const Estimate diff = cauchy_solution(spec_of(Problem::cauchy_diff, torus, 0.4), p, t, q);
    CHECK(std::abs(sum.value - (plus + minus)) < 1e-14);
    CHECK(std::abs(diff.value - (plus - minus)) < 1e-14);
    CauchyQuadrature many = q;
    many.workers = 4;
    const Estimate again = cauchy_solution(spec_of(Problem::cauchy_sum, torus, 0.4), p, t, many);
    CHECK(again.value == sum.value);
    CHECK(again.error == sum.error);
    CHECK_THROWS_AS(cauchy_solution(spec_of(Problem::ibvp_ones, torus, 0.4), p, t), ConfigError);
  }

  TEST_CASE("plane closed forms") {
    const TemperatureField diff = make_field(spec_of(Problem::cauchy_diff, PlaneParams{}, 1.0));
    for (double t : {1e-3, 0.1, 2.0}) CHECK(diff.value(Vec3(0.3, -2.0, 0.0), t).value == 0.0);
    const TemperatureField sum = make_field(spec_of(Problem::cauchy_sum, PlaneParams{}, 1.0));
    CHECK(sum.value(Vec3::Zero(), 0.25).value == Approx(2.0 * 0.07864960352514257).epsilon(1e-14));
    CHECK(sum.provenance() == Provenance::closed_form);
    CHECK(sum.planar.has_value());
  }

  TEST_CASE("field construction validates its input") {
    CHECK_THROWS_AS(make_field(spec_of(Problem::cauchy_sum, SphereParams{2.0}, 3.0)), DomainError);
    HeatProblemSpec four = spec_of(Problem::cauchy_sum, PlaneParams{}, 1.0);
    four.dimension = 4;
    CHECK_THROWS_AS(make_field(four), ConfigError);
    CHECK_THROWS_AS(make_field(spec_of(Problem::ibvp_ones, PlaneParams{}, 1.0)), ConfigError);
    CHECK_THROWS_AS(make_field(spec_of(Problem::aux_plus_dirichlet, TorusParams{}, 0.4)), ConfigError);
    CHECK(parse_problem("ibvp_pm") == Problem::ibvp_pm);
    CHECK_THROWS_AS(parse_problem("heat"), ConfigError);
  }

  TEST_CASE("slab solver against the Fourier series") {
    const std::vector<double> times{0.05, 0.2};
    const TemperatureField f = solve_ibvp_slab(1.0, {1.0, 1.0}, times);
    for (double t : times)
      for (double z : {-0.5, 0.0, 0.7}) {
        CAPTURE(t);
        CAPTURE(z);
        const Estimate e = f.value(Vec3(0.0, 0.0, z), t);
        CHECK(std::abs(e.value - oracle::slab_ones(z, 1.0, t)) < 1e-4);
        CHECK(e.error < 1e-3);
      }
    CHECK(f.planar.has_value());
    CHECK_THROWS_AS(f.value(Vec3::Zero(), 0.5), DomainError);
  }

  TEST_CASE("line solver converges at second order in space") {
    const double coarse = line_error(40, 0.1), fine = line_error(80, 0.1);
    CHECK(coarse / fine >= 3.0);
  }

  TEST_CASE("explicit stepping enforces its stability limit") {
    const std::vector<double> times{0.1};
    CHECK_THROWS_AS(solve_line(-1.0, 1.0, 0.0, 1.0, 1.0, 400, times, {TimeScheme::explicit_euler, 1e-3}),
                    EvaluationError);
    const LineSolution ok =
        solve_line(-1.0, 1.0, 0.0, 1.0, 1.0, 40, times, {TimeScheme::explicit_euler, 1e-4});
    CHECK(std::abs(ok.value(0.0, 0.1) - oracle::slab_ones(0.0, 1.0, 0.1)) < 1e-3);
    const std::vector<double> bad{0.2, 0.1};
    CHECK_THROWS_AS(solve_line(-1.0, 1.0, 0.0, 1.0, 1.0, 40, bad, {}), ConfigError);
  }

  TEST_CASE("radial solver reaches the annulus steady state") {
    const std::vector<double> times{20.0};
    const TemperatureField f = solve_ibvp_radial(2.0, 1.0, {1.0, -1.0}, times);
    for (double r : {1.2, 2.0, 2.8})
      CHECK(f.value(Vec3(0.0, r, 0.0), 20.0).value == Approx(oracle::annulus_pm_steady(r)).epsilon(1e-5));
  }

  TEST_CASE("radial solver matches the exterior ball solution at early times") {
    const std::vector<double> times{0.005};
    const TemperatureField f = solve_ibvp_radial(2.0, 1.0, {0.0, 1.0}, times, {800});
    for (double r : {1.05, 1.15})
      CHECK(std::abs(f.value(Vec3(r, 0.0, 0.0), 0.005).value - ball_exterior_dirichlet(r, 1.0, 0.005)) < 2e-4);
  }

  TEST_CASE("3-D solver agrees with the radial reduction") {
    const std::vector<double> times{0.2};
    const SurfaceChart sphere = make_surface(SphereParams{2.0});
    GridSpec grid;
    grid.spacing = 0.125;
    grid.estimate_error = false;
    grid.workers = 4;
    const TemperatureField f3 =
        solve_ibvp_3d(sphere, 1.0, {1.0, 1.0}, grid, times, {TimeScheme::backward_euler, 4e-3});
    const TemperatureField f1 = solve_ibvp_radial(2.0, 1.0, {1.0, 1.0}, times);
    for (const Vec3& p : {Vec3(1.5, 0.0, 0.0), Vec3(0.0, 1.4, 1.4), Vec3(-1.0, -1.0, -1.6)}) {
      CAPTURE(p.transpose());
      CHECK(std::abs(f3.value(p, 0.2).value - f1.value(p, 0.2).value) < 0.02);
    }
    CHECK(f3.diagnostics.at("unresolved_nodes") == 0.0);
  }

  TEST_CASE("3-D solver on the torus stays in range") {
    const std::vector<double> times{0.02, 0.05};
    const SurfaceChart torus = make_surface(TorusParams{1.0, 3.0});
    GridSpec grid;
    grid.spacing = 0.08;
    grid.estimate_error = false;
    grid.workers = 4;
    const TemperatureField f =
        solve_ibvp_3d(torus, 0.4, {1.0, 1.0}, grid, times, {TimeScheme::backward_euler, 2e-3});
    for (double t : times)
      for (double th : {0.0, 1.0, 2.5, pi})
        for (double s : {-0.3, 0.0, 0.3}) {
          const Vec3 p = torus.point({th, 0.4}) + s * torus.normal({th, 0.4});
          const double u = f.value(p, t).value;
          CHECK(u >= -1e-9);
          CHECK(u <= 1.0 + 1e-9);
        }
    grid.spacing = 0.2;
    CHECK_THROWS_AS(solve_ibvp_3d(torus, 0.4, {1.0, 1.0}, grid, times), ConfigError);
    grid.spacing = 0.08;
    CHECK_THROWS_AS(solve_ibvp_3d(torus, 0.4, {1.0, 1.0}, grid, times, {TimeScheme::explicit_euler, 1e-4}),
                    ConfigError);
  }

  TEST_CASE("comparison sandwiches") {
    const std::vector<double> times{1e-3, 0.05, 0.5};
    std::vector<Vec3> samples;
    for (double z : {-0.9, -0.4, 0.0, 0.4, 0.9}) samples.emplace_back(0.1, 0.0, z);
    auto plane = [&](Problem p) { return make_field(spec_of(p, PlaneParams{}, 1.0)); };
    const TemperatureField up = plane(Problem::aux_plus), um = plane(Problem::aux_minus);
    CHECK(comparison_bounds_check(plane(Problem::cauchy_sum), up, um, samples, times, Problem::cauchy_sum)
              .max_violation <= 1e-15);
    CHECK(comparison_bounds_check(plane(Problem::cauchy_diff), up, um, samples, times, Problem::cauchy_diff)
              .max_violation <= 1e-15);

    FieldOptions opts;
    opts.times = times;
    auto sphere = [&](Problem p) { return make_field(spec_of(p, SphereParams{2.0}, 1.0), opts); };
    std::vector<Vec3> shell;
    for (double r : {1.1, 1.5, 2.0, 2.5, 2.9}) shell.emplace_back(0.0, 0.0, r);
    const TemperatureField dp = sphere(Problem::aux_plus_dirichlet), dm = sphere(Problem::aux_minus_dirichlet);
    const ComparisonReport ones =
        comparison_bounds_check(sphere(Problem::ibvp_ones), dp, dm, shell, times, Problem::ibvp_ones);
    CHECK(ones.max_violation <= 1e-3);
    CHECK(ones.evaluations == shell.size() * times.size());
    CHECK(comparison_bounds_check(sphere(Problem::ibvp_pm), dp, dm, shell, times, Problem::ibvp_pm)
              .max_violation <= 1e-3);

    const TemperatureField other = make_field(spec_of(Problem::aux_plus, PlaneParams{}, 0.5));
    CHECK_THROWS_AS(comparison_bounds_check(plane(Problem::cauchy_sum), other, um, samples, times,
                                            Problem::cauchy_sum),
                    ConfigError);
  }

  TEST_CASE("Varadhan asymptotics") {
    const TemperatureField up = make_field(spec_of(Problem::aux_plus, PlaneParams{}, 1.0));
    const SurfaceChart plane = make_surface(PlaneParams{});
    const Vec3 p(0.2, 0.3, 0.0);
    const double d = distance_to_offset(p, plane, 1.0, OffsetSide::plus);
    CHECK(d == Approx(1.0).epsilon(1e-14));
    const std::vector<VaradhanProbe> probes{{p, d}};
    const std::vector<double> times{1e-2, 5e-3, 1e-3};
    const VaradhanTable table = varadhan_check(up, probes, times);
    REQUIRE(table.rows.size() == 3);
    CHECK_FALSE(table.underflow);
    CHECK(table.rows.back().ratio == Approx(1.0).epsilon(0.05));
    for (std::size_t i = 1; i < table.rows.size(); ++i)
      CHECK(std::abs(table.rows[i].ratio - 1.0) < std::abs(table.rows[i - 1].ratio - 1.0));

    const std::vector<double> tiny{1e-3, 1e-4};
    const VaradhanTable under = varadhan_check(up, probes, tiny);
    CHECK(under.underflow);
    CHECK(under.smallest_usable_t.front() == 1e-3);
    const std::vector<double> rising{1e-3, 1e-2};
    CHECK_THROWS_AS(varadhan_check(up, probes, rising), ConfigError);
  }
}
