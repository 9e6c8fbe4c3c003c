#include <cmath>
#include <numbers>

#include <doctest.h>

#include "isotherm/errors.hpp"
#include "isotherm/geometry.hpp"
#include "oracles.hpp"

using namespace isotherm;
using doctest::Approx;
using std::numbers::pi;

namespace {

// Principal curvatures from a centred-difference derivative of the unit
// normal: L = -N_u . s_u, M = -N_u . s_v, N = -N_v . s_v.
CurvaturePair fd_curvatures(const SurfaceChart& chart, ChartPoint uv, double h) {
  const ChartDerivatives d = chart.derivatives(uv);
  const Vec3 nu = (chart.normal({uv.u + h, uv.v}) - chart.normal({uv.u - h, uv.v})) / (2 * h);
  const Vec3 nv = (chart.normal({uv.u, uv.v + h}) - chart.normal({uv.u, uv.v - h})) / (2 * h);
  FundamentalForms f{d.du.dot(d.du), d.du.dot(d.dv), d.dv.dot(d.dv),
                     -nu.dot(d.du), -0.5 * (nu.dot(d.dv) + nv.dot(d.du)), -nv.dot(d.dv)};
  return principal_curvatures(f);
}

double fd_error(const SurfaceChart& chart, ChartPoint uv, double h) {
  const CurvaturePair exact = principal_curvatures(chart, uv);
  const CurvaturePair fd = fd_curvatures(chart, uv, h);
  return std::max(std::abs(fd.k1() - exact.k1()), std::abs(fd.k2() - exact.k2()));
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("catalog construction rejects bad parameters") {
    CHECK_THROWS_AS(make_surface(TorusParams{3.0, 3.0}), ConfigError);
    CHECK_THROWS_AS(make_surface(TorusParams{1.0, 0.5}), ConfigError);
    CHECK_THROWS_AS(make_surface(SphereParams{-1.0}), ConfigError);
    CHECK_THROWS_AS(make_surface(HelicoidParams{0.0}), ConfigError);
    CHECK_NOTHROW(make_surface(TorusParams{1.0, 3.0}));
  }

  TEST_CASE("chart maps") {
    const SurfaceChart sphere = make_surface(SphereParams{2.0});
    for (ChartPoint uv : {ChartPoint{0.3, 1.0}, ChartPoint{2.0, 5.0}}) {
      const Vec3 p = sphere.point(uv);
      CHECK(p.norm() == Approx(2.0).epsilon(1e-14));
      CHECK((sphere.normal(uv) - p / 2.0).norm() < 1e-14);
    }
    const SurfaceChart plane = make_surface(PlaneParams{});
    CHECK((plane.normal({0.4, -1.0}) - Vec3::UnitZ()).norm() < 1e-15);

    const SurfaceChart heli = make_surface(HelicoidParams{1.0});
    const ChartDerivatives d = heli.derivatives({1.0, 0.0});
    CHECK((d.point - Vec3(1.0, 0.0, 0.0)).norm() < 1e-15);
    const SurfaceFrame fr = surface_frame(heli, {1.0, 0.0});
    CHECK(fr.normal.norm() == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(fr.normal.dot(d.du)) < 1e-14);
    CHECK(std::abs(fr.normal.dot(d.dv)) < 1e-14);
    CHECK(std::abs(fr.tangent_u.dot(fr.tangent_w)) < 1e-14);
    CHECK(std::abs(fr.tangent_w.dot(fr.normal)) < 1e-14);
  }

  TEST_CASE("degenerate metric is an evaluation failure") {
    const SurfaceChart sphere = make_surface(SphereParams{2.0});
    CHECK_THROWS_AS(sphere.normal({0.0, 0.0}), EvaluationError);
  }

  TEST_CASE("principal curvatures of the catalog") {
    const CurvaturePair s = principal_curvatures(make_surface(SphereParams{2.0}), {1.0, 2.0});
    CHECK(s.k1() == Approx(-0.5).epsilon(1e-14));
    CHECK(s.k2() == Approx(-0.5).epsilon(1e-14));
    CHECK(s.umbilicity_gap() < 1e-15);

    const CurvaturePair p = principal_curvatures(make_surface(PlaneParams{}), {0.2, 0.1});
    CHECK(p.k1() == 0.0);
    CHECK(p.k2() == 0.0);

    const SurfaceChart heli = make_surface(HelicoidParams{1.0});
    const CurvaturePair h0 = principal_curvatures(heli, {0.0, 0.7});
    CHECK(h0.k1() == Approx(-1.0).epsilon(1e-14));
    CHECK(h0.k2() == Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(h0.mean()) < 1e-15);
    CHECK(h0.gauss() == Approx(-1.0).epsilon(1e-14));
    const SurfaceChart heli2 = make_surface(HelicoidParams{2.0});
    for (double u : {0.5, 1.0, 3.0}) {
      const CurvaturePair k = principal_curvatures(heli2, {u, 0.3});
      CHECK(k.k2() == Approx(2.0 / (4.0 + u * u)).epsilon(1e-13));
      CHECK(k.k1() == Approx(-2.0 / (4.0 + u * u)).epsilon(1e-13));
    }

    const CurvaturePair c = principal_curvatures(make_surface(CylinderParams{2.0}), {1.0, 0.5});
    CHECK(c.k1() == Approx(-0.5).epsilon(1e-14));
    CHECK(std::abs(c.k2()) < 1e-15);

    const SurfaceChart torus = make_surface(TorusParams{1.0, 3.0});
    const CurvaturePair outer = principal_curvatures(torus, {0.0, 0.3});
    CHECK(outer.k1() == Approx(-1.0).epsilon(1e-13));
    CHECK(outer.k2() == Approx(-0.25).epsilon(1e-13));
    const CurvaturePair inner = principal_curvatures(torus, {pi, 0.3});
    CHECK(inner.k1() == Approx(-1.0).epsilon(1e-13));
    CHECK(inner.k2() == Approx(0.5).epsilon(1e-13));
  }

  TEST_CASE("curvature pair is canonical") {
    const CurvaturePair a(0.3, -0.2);
    CHECK(a.k1() == -0.2);
    CHECK(a.k2() == 0.3);
    CHECK(a.mean() == Approx(0.05));
    CHECK(a.gauss() == Approx(-0.06));
    CHECK(a.max_abs() == 0.3);
  }

  TEST_CASE("flipping the orientation negates curvatures") {
    const SurfaceChart torus = make_surface(TorusParams{1.0, 3.0});
    const CurvaturePair a = principal_curvatures(torus, {0.7, 0.2});
    const CurvaturePair b = principal_curvatures(torus.flipped(), {0.7, 0.2});
    CHECK(b.k1() == Approx(-a.k2()).epsilon(1e-14));
    CHECK(b.k2() == Approx(-a.k1()).epsilon(1e-14));
  }

  TEST_CASE("curvature bound check") {
    const SurfaceChart sphere = make_surface(SphereParams{2.0});
    const BoundCheck ok = curvature_bound_check(sphere, SampleRegion::whole(sphere, 16, 16), 1.0);
    CHECK(ok.pass);
    CHECK(ok.sup_scaled == Approx(0.5).epsilon(1e-14));
    const BoundCheck bad = curvature_bound_check(sphere, SampleRegion::whole(sphere, 16, 16), 3.0);
    CHECK_FALSE(bad.pass);
    CHECK(bad.sup_scaled == Approx(1.5).epsilon(1e-14));
    const SurfaceChart torus = make_surface(TorusParams{1.0, 3.0});
    const BoundCheck t = curvature_bound_check(torus, SampleRegion::whole(torus), 0.4);
    CHECK(t.pass);
    CHECK(t.sup_scaled == Approx(0.4).epsilon(1e-12));
    CHECK_THROWS_AS(curvature_bound_check(torus, SampleRegion::whole(torus), 0.0), DomainError);
  }

  TEST_CASE("foot points") {
    const SurfaceChart sphere = make_surface(SphereParams{2.0});
    const FootPointPair fp = foot_points(sphere, {1.1, 0.4}, 1.0);
    CHECK(fp.plus.norm() == Approx(3.0).epsilon(1e-14));
    CHECK(fp.minus.norm() == Approx(1.0).epsilon(1e-14));

    const FootPointPair pl = foot_points(make_surface(PlaneParams{}), {0.5, -0.5}, 1.0);
    CHECK((pl.plus - Vec3(0.5, -0.5, 1.0)).norm() < 1e-15);
    CHECK((pl.minus - Vec3(0.5, -0.5, -1.0)).norm() < 1e-15);

    CHECK_THROWS_AS(foot_points(sphere, {1.0, 1.0}, 2.5), DomainError);
  }

  TEST_CASE("foot points and signed distance round trip on every catalog surface") {
    struct Case {
      SurfaceParams params;
      double R;
      std::vector<ChartPoint> uvs;
    };
    const std::vector<Case> cases{
        {PlaneParams{}, 1.0, {{0.0, 0.0}, {1.0, -2.0}}},
        {SphereParams{2.0}, 1.0, {{0.5, 0.5}, {2.0, 4.0}}},
        {CylinderParams{2.0}, 1.0, {{0.3, 1.0}, {4.0, -2.0}}},
        {TorusParams{1.0, 3.0}, 0.4, {{0.0, 0.0}, {2.0, 1.0}, {pi, 4.0}}},
        {HelicoidParams{1.0}, 0.5, {{1.0, 0.0}, {-0.7, 1.3}, {2.0, -2.0}}},
        {GraphParams{0.1}, 0.5, {{0.3, 0.2}, {1.5, -1.0}}},
    };
    for (const Case& c : cases) {
      const SurfaceChart chart = make_surface(c.params);
      for (ChartPoint uv : c.uvs) {
        CAPTURE(chart.label());
        CAPTURE(uv.u);
        CAPTURE(uv.v);
        const FootPointPair fp = foot_points(chart, uv, c.R);
        CHECK((fp.plus - fp.base).norm() == Approx(c.R).epsilon(1e-14));
        CHECK((fp.plus - fp.base).dot(fp.minus - fp.base) == Approx(-c.R * c.R).epsilon(1e-12));
        CHECK(signed_distance(fp.plus, chart).distance == Approx(c.R).epsilon(1e-8));
        CHECK(signed_distance(fp.minus, chart).distance == Approx(-c.R).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("offset curvature examples") {
    const OffsetCurvatures s = offset_curvatures(CurvaturePair(-0.5, -0.5), 1.0);
    CHECK(s.plus.k1() == Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(s.minus.k1() == Approx(-1.0).epsilon(1e-15));
    const OffsetCurvatures z = offset_curvatures(CurvaturePair(0.0, 0.0), 1.0);
    CHECK(z.plus.k1() == 0.0);
    CHECK(z.minus.k2() == 0.0);
    const OffsetCurvatures k = offset_curvatures(CurvaturePair(0.4, 0.4), 1.0);
    CHECK(k.plus.k1() == Approx(-2.0 / 3.0).epsilon(1e-15));
    CHECK(k.minus.k1() == Approx(2.0 / 7.0).epsilon(1e-15));
    CHECK(1.0 - k.plus.k1() == Approx(1.0 / 0.6).epsilon(1e-15));
    CHECK_THROWS_AS(offset_curvatures(CurvaturePair(1.0, 0.0), 1.0), DomainError);
    CHECK_THROWS_AS(offset_curvatures(CurvaturePair(-1.2, 0.0), 1.0), DomainError);
  }

  TEST_CASE("offset identity on random admissible pairs") {
    oracle::AdmissiblePairs gen;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const auto s = gen.next();
      const CurvaturePair pair(s.k1, s.k2);
      const OffsetCurvatures off = offset_curvatures(pair, s.R);
      for (int j = 0; j < 2; ++j) {
        const double k = j == 0 ? pair.k1() : pair.k2();
        // offset of k1 is the larger of the plus pair, the smaller of the minus pair
        const double kp = j == 0 ? off.plus.k2() : off.plus.k1();
        const double km = j == 0 ? off.minus.k1() : off.minus.k2();
        worst = std::max(worst, std::abs((1.0 - s.R * kp) * (1.0 - s.R * k) - 1.0));
        worst = std::max(worst, std::abs((1.0 - s.R * km) * (1.0 + s.R * k) - 1.0));
      }
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("offset charts agree with offset curvatures") {
    for (const SurfaceParams& params :
         {SurfaceParams{SphereParams{2.0}}, SurfaceParams{CylinderParams{2.0}},
          SurfaceParams{PlaneParams{}}}) {
      const SurfaceChart chart = make_surface(params);
      const ChartPoint uv{0.9, 0.4};
      const OffsetCurvatures off = offset_curvatures(principal_curvatures(chart, uv), 1.0);
      const CurvaturePair plus = principal_curvatures(offset_chart(chart, OffsetSide::plus, 1.0), uv);
      const CurvaturePair minus =
          principal_curvatures(offset_chart(chart, OffsetSide::minus, 1.0), uv);
      CAPTURE(chart.label());
      CHECK(std::abs(plus.k1() - off.plus.k1()) < 1e-8);
      CHECK(std::abs(plus.k2() - off.plus.k2()) < 1e-8);
      CHECK(std::abs(minus.k1() - off.minus.k1()) < 1e-8);
      CHECK(std::abs(minus.k2() - off.minus.k2()) < 1e-8);
    }
    CHECK_THROWS_AS(offset_chart(make_surface(TorusParams{}), OffsetSide::plus, 0.4), ConfigError);
  }

  TEST_CASE("signed distance examples") {
    const SurfaceChart sphere = make_surface(SphereParams{2.0});
    CHECK(signed_distance(Vec3(0.0, 3.0, 0.0), sphere).distance == Approx(1.0).epsilon(1e-14));
    const SurfaceChart plane = make_surface(PlaneParams{});
    CHECK(signed_distance(Vec3(0.0, 0.0, -0.7), plane).distance == Approx(-0.7).epsilon(1e-14));
  }

  TEST_CASE("Newton projection matches closed forms") {
    ProjectionOptions newton;
    newton.use_closed_form = false;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const SurfaceParams& params :
         {SurfaceParams{SphereParams{2.0}}, SurfaceParams{CylinderParams{2.0}},
          SurfaceParams{TorusParams{1.0, 3.0}}}) {
      const SurfaceChart chart = make_surface(params);
      for (int i = 0; i < 20; ++i) {
        const ChartPoint uv{0.5 + 1.5 * (u(gen) + 1.0), 3.0 + 2.5 * u(gen)};
        const Vec3 p = chart.point(uv) + 0.35 * u(gen) * chart.normal(uv);
        const double exact = signed_distance(p, chart).distance;
        CAPTURE(chart.label());
        CHECK(project_newton(p, chart, newton).distance == Approx(exact).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("graph distance agrees with a brute-force search") {
    const SurfaceChart graph = make_surface(GraphParams{0.1});
    const Vec3 p(0.4, -0.9, 0.3);
    double best = 1e9;
    for (int i = 0; i <= 400; ++i)
      for (int j = 0; j <= 400; ++j) {
        const ChartPoint uv{-0.6 + 2.0 * i / 400.0, -1.9 + 2.0 * j / 400.0};
        best = std::min(best, (graph.point(uv) - p).norm());
      }
    const double d = signed_distance(p, graph).distance;
    CHECK(d > 0.0);
    CHECK(d == Approx(best).epsilon(1e-4));
  }

  TEST_CASE("classify point") {
    const SurfaceChart sphere = make_surface(SphereParams{2.0});
    CHECK(classify_point(Vec3::Zero(), sphere, 1.0) == Region::omega_minus);
    CHECK(classify_point(Vec3(0.0, 0.0, 4.0), sphere, 1.0) == Region::omega_plus);
    CHECK(classify_point(Vec3(0.0, 0.0, 0.3), make_surface(PlaneParams{}), 1.0) == Region::tube);
  }

  TEST_CASE("finite-difference normals converge at second order") {
    const std::vector<std::pair<SurfaceParams, ChartPoint>> cases{
        {TorusParams{1.0, 3.0}, {0.7, 1.1}},
        {HelicoidParams{1.0}, {0.8, 0.3}},
        {GraphParams{0.3}, {0.4, 1.2}},
        {CylinderParams{2.0}, {0.5, 0.5}},
    };
    for (const auto& [params, uv] : cases) {
      const SurfaceChart chart = make_surface(params);
      const double e1 = fd_error(chart, uv, 1e-2), e2 = fd_error(chart, uv, 5e-3);
      CAPTURE(chart.label());
      if (e1 < 1e-12) continue;  // exact already (cylinder)
      CHECK(std::log2(e1 / e2) >= 1.9);
    }
  }
}
