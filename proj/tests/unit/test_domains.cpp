#include <random>

#include "caplab/domains.hpp"
#include "caplab/surfaces.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace caplab;
using namespace caplab::domains;
namespace sf = caplab::surfaces;

namespace {

double geodesic_distance_s3(const Vec3& x, const Vec4& pole) {
  return std::acos(std::clamp(geometry::s3_lift(x).point.dot(pole), -1.0, 1.0));
}

double isothermality_residual(const Domain& d, const IsothermalBoundary& b, double v, double z) {
  const double h = 1e-6;
  const Vec3 y = b.map(v, z);
  const Vec3 yv = (b.map(v + h, z) - b.map(v - h, z)) / (2 * h);
  const Vec3 yz = (b.map(v, z + h) - b.map(v, z - h)) / (2 * h);
  const auto& c = d.chart();
  const double lb2 = std::pow(b.lambda_b(v, z), 2);
  return std::max({std::abs(c.inner(y, yv, yv) - lb2), std::abs(c.inner(y, yz, yz) - lb2),
                   std::abs(c.inner(y, yv, yz))});
}

}  // namespace

TEST_CASE("classify_point") {
  const auto ball = Domain::unit_ball();
  CHECK(classify_point(ball, Vec3::Zero()) == PointClass::interior);
  CHECK(classify_point(ball, Vec3(0, 0, 1)) == PointClass::boundary);
  CHECK(classify_point(ball, Vec3(0, 1.1, 0)) == PointClass::exterior);
  CHECK(classify_point(Domain::half_space(), Vec3(5, 3, 0)) == PointClass::boundary);
  CHECK(classify_point(Domain::half_space(), Vec3(5, 3, -1)) == PointClass::exterior);

  const auto caps = Domain::s3_two_caps(1.2);
  const Vec3 x = Vec3(1, 2, -1).normalized() * std::tan(0.6);
  CHECK(std::abs(x.norm() - 0.684137) < 1e-6);
  CHECK(classify_point(caps, x) == PointClass::boundary);
  CHECK(geodesic_distance_s3(x, Vec4(0, 0, 0, 1)) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(classify_point(caps, Vec3(1, 0, 0)) == PointClass::interior);
  CHECK(classify_point(caps, Vec3(0.1, 0, 0)) == PointClass::exterior);
  CHECK(classify_point(caps, Vec3(10, 0, 0)) == PointClass::exterior);
}

TEST_CASE("s3_two_caps boundary spheres sit at geodesic distance r from the poles") {
  const Vec4 north(0, 0, 0, 1), south(0, 0, 0, -1);
  std::mt19937_64 rng(1);
  for (double r : {0.3, 0.6, 1.2, 1.5}) {
    const auto caps = Domain::s3_two_caps(r);
    CHECK(caps.boundary()[0].radius < caps.boundary()[1].radius);
    for (int i = 0; i < 20; ++i) {
      const Vec3 dir = oracle::random_unit(rng);
      CHECK(std::abs(geodesic_distance_s3(caps.boundary()[0].radius * dir, north) - r) < 1e-10);
      CHECK(std::abs(geodesic_distance_s3(caps.boundary()[1].radius * dir, south) - r) < 1e-10);
    }
  }
  CHECK_THROWS_AS(Domain::s3_two_caps(-0.1), GeometryError);
  CHECK_THROWS_AS(Domain::s3_two_caps(M_PI / 2), GeometryError);
}

TEST_CASE("boundary normals are g-unit and inward") {
  std::mt19937_64 rng(2);
  const auto caps = Domain::s3_two_caps(0.8);
  for (const auto* d : {&caps}) {
    for (const auto& comp : d->boundary()) {
      for (int i = 0; i < 10; ++i) {
        const Vec3 p = comp.radius * oracle::random_unit(rng);
        const Vec3 n = d->inward_normal(p);
        CHECK(d->chart().norm(p, n) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(classify_point(*d, p + 1e-4 * n / n.norm()) == PointClass::interior);
      }
    }
  }
  const auto ball = Domain::unit_ball();
  CHECK((ball.inward_normal(Vec3(0, 0, 1)) - Vec3(0, 0, -1)).norm() == 0.0);
  CHECK((Domain::half_space().inward_normal(Vec3(2, 1, 0)) - Vec3::UnitZ()).norm() == 0.0);
}

TEST_CASE("boundary_isothermal") {
  SUBCASE("half space is affine") {
    const auto b = boundary_isothermal(Domain::half_space(), Vec3::Zero(), Vec3::UnitX());
    CHECK((b.map(0.3, -0.2) - Vec3(0.3, -0.2, 0)).norm() < 1e-15);
    CHECK(b.lambda_b(0.3, 0.4) == 1.0);
  }
  SUBCASE("unit ball at the south pole") {
    const auto ball = Domain::unit_ball();
    const auto b = boundary_isothermal(ball, Vec3(0, 0, -1));
    CHECK((b.map(0, 0) - Vec3(0, 0, -1)).norm() < 1e-15);
    double worst = 0.0;
    for (double v = -0.5; v <= 0.5; v += 0.125)
      for (double z = -0.5; z <= 0.5; z += 0.125) {
        worst = std::max(worst, isothermality_residual(ball, b, v, z));
        CHECK(std::abs(b.map(v, z).norm() - 1.0) < 1e-14);
      }
    CHECK(worst < 1e-9);
  }
  SUBCASE("two-caps components") {
    const auto caps = Domain::s3_two_caps(0.9);
    std::mt19937_64 rng(4);
    for (const auto& comp : caps.boundary()) {
      const Vec3 p = comp.radius * oracle::random_unit(rng);
      const auto b = boundary_isothermal(caps, p);
      double worst = 0.0;
      for (double v = -0.5; v <= 0.5; v += 0.25)
        for (double z = -0.5; z <= 0.5; z += 0.25) {
          worst = std::max(worst, isothermality_residual(caps, b, v, z));
          CHECK(classify_point(caps, b.map(v, z)) == PointClass::boundary);
        }
      CHECK(worst < 1e-9);
    }
  }
  CHECK_THROWS_AS(boundary_isothermal(Domain::unit_ball(), Vec3(0, 0, 0.5)), GeometryError);
}

TEST_CASE("boundary_adapted_chart") {
  SUBCASE("half space") {
    const auto bc = boundary_adapted_chart(Domain::half_space(), Vec3::Zero(), Vec3::UnitX());
    CHECK((bc(0.2, 0.3, -0.4) - Vec3(0.3, -0.4, 0.2)).norm() < 1e-15);
  }
  SUBCASE("unit ball radial geodesic") {
    const auto bc = boundary_adapted_chart(Domain::unit_ball(), Vec3(0, 0, -1), Vec3::UnitX());
    for (double u : {0.0, 0.01, 0.04}) CHECK((bc(u, 0, 0) - Vec3(0, 0, -1 + u)).norm() < 1e-15);
    CHECK((bc.chart.jacobian(0, 0, 0).col(1) - Vec3::UnitX()).norm() < 1e-9);
  }
  SUBCASE("chart invariants") {
    std::mt19937_64 rng(8);
    const auto caps = Domain::s3_two_caps(1.1);
    const auto ball = Domain::unit_ball();
    struct Case {
      const Domain* d;
      Vec3 p;
    };
    std::vector<Case> cases = {{&ball, oracle::random_unit(rng)},
                               {&caps, caps.boundary()[0].radius * oracle::random_unit(rng)},
                               {&caps, caps.boundary()[1].radius * oracle::random_unit(rng)}};
    for (const auto& c : cases) {
      const Vec3 n = c.d->outward_unit(c.p);
      Vec3 t = oracle::random_unit(rng);
      t = (t - t.dot(n) * n).normalized();
      const auto bc = boundary_adapted_chart(*c.d, c.p, t);
      CHECK((bc.base_point() - c.p).norm() < 1e-15);
      const Mat3 j0 = bc.chart.jacobian(0, 0, 0);
      CHECK(j0.col(1).normalized().dot(t) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(j0.determinant() > 0.0);
      double orth = 0.0, iso = 0.0;
      for (double v = -0.3; v <= 0.3; v += 0.15)
        for (double z = -0.3; z <= 0.3; z += 0.15) {
          const Mat3 g = bc.chart.metric_coefficients(0.0, v, z);
          const double lb2 = std::pow(bc.lambda_b(v, z), 2);
          orth = std::max({orth, std::abs(g(0, 1)), std::abs(g(0, 2))});
          iso = std::max({iso, std::abs(g(1, 1) - lb2), std::abs(g(2, 2) - lb2), std::abs(g(1, 2))});
          CHECK(std::abs(g(0, 0) - 1.0) < 1e-8);
          CHECK(classify_point(*c.d, bc(0.0, v, z)) == PointClass::boundary);
          CHECK(classify_point(*c.d, bc(0.01, v, z)) == PointClass::interior);
        }
      CHECK(orth < 1e-8);
      CHECK(iso < 1e-8);
    }
  }
  SUBCASE("S3 normal geodesic reaches the expected radius") {
    // Inner cap boundary |x| = tan(r/2); moving inward by u along the radial
    // geodesic lands on |x| = tan((r + u)/2).
    const double r = 0.7;
    const auto caps = Domain::s3_two_caps(r);
    const Vec3 p = std::tan(r / 2) * Vec3(0, 1, 0);
    const auto bc = boundary_adapted_chart(caps, p, Vec3::UnitX());
    for (double u : {0.01, 0.03, 0.05}) CHECK(bc(u, 0, 0).norm() == doctest::Approx(std::tan((r + u) / 2)).epsilon(1e-12));
  }
}

TEST_CASE("graph_in_chart") {
  const auto e = geometry::ConformalChart::euclidean();
  SUBCASE("plane in its own chart") {
    const auto chart = interior_adapted_chart(e, Vec3(1, 2, 3), Vec3::UnitX(), Vec3(0, 1, 1));
    const auto g = graph_in_chart(sf::implicit_plane(Vec3(1, 2, 3), Vec3(0, 1, 1)), chart);
    for (double u : {-0.05, 0.0, 0.07}) CHECK(std::abs(g(u, 0.3 * u)) < 1e-15);
    const auto d = g.derivatives(0, 0);
    CHECK(std::abs(d.huu) + std::abs(d.huv) + std::abs(d.hvv) < 1e-9);
  }
  SUBCASE("unit sphere seen from its south pole") {
    const auto chart = interior_adapted_chart(e, Vec3(0, 0, -1), Vec3::UnitX(), Vec3::UnitZ());
    const auto g = graph_in_chart(sf::implicit_sphere(Vec3::Zero(), 1.0, -1), chart);
    for (double u : {0.0, 0.05, -0.08}) {
      const double v = 0.04 - u / 2;
      CHECK(g(u, v) == doctest::Approx(1.0 - std::sqrt(1.0 - u * u - v * v)).epsilon(1e-12));
    }
    const auto d = g.derivatives(0, 0);
    CHECK(d.h == 0.0);
    CHECK(d.huu == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.hvv == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(d.huv) < 1e-9);
    // Third derivatives of 1 - sqrt(1 - r^2) vanish at the origin; at (0.1, 0) huuu = 3u(...).
    const auto d1 = g.derivatives(0.1, 0.0);
    const double s = 1.0 - 0.01;
    CHECK(d1.huuu == doctest::Approx(3.0 * 0.1 / std::pow(s, 1.5) + 3.0 * 0.001 / std::pow(s, 2.5)).epsilon(1e-3));
  }
  SUBCASE("gradient on a steep part of the sphere") {
    const auto chart = interior_adapted_chart(e, Vec3(0, 0, -1), Vec3::UnitX(), Vec3::UnitZ());
    const auto g = graph_in_chart(sf::implicit_sphere(Vec3::Zero(), 1.0, -1), chart, 0.1, 8e-3);
    for (double u : {0.0, 0.5, 0.9, 0.97}) {
      const double w = std::sqrt(1.0 - u * u - 0.01);
      const Vec2 grad = g.gradient(u, 0.1);
      CHECK(grad(0) == doctest::Approx(u / w).epsilon(1e-10));
      CHECK(grad(1) == doctest::Approx(0.1 / w).epsilon(1e-10));
    }
  }
  SUBCASE("re-embedding reproduces surface points") {
    const auto s3 = geometry::ConformalChart::sphere3();
    const auto patch = sf::sphere_patch(Vec3(0.1, 0, 0.2), 0.5, Vec3::UnitZ(), 0.2, 2.9, 1);
    const auto jet = patch.param.jet(1.0, 0.5);
    const Vec3 n = patch.implicit.unit_normal(jet.x);
    const auto chart = interior_adapted_chart(s3, jet.x, jet.xu, n);
    const auto g = graph_in_chart(patch.implicit, chart);
    for (double u : {-0.05, 0.02, 0.06})
      for (double v : {-0.04, 0.03}) CHECK(patch.implicit.distance_estimate(g.embed(u, v)) < 1e-9);
  }
  SUBCASE("vertical tangency") {
    const auto chart = interior_adapted_chart(e, Vec3::Zero(), Vec3::UnitX(), Vec3::UnitZ());
    CHECK_THROWS_WITH_AS(graph_in_chart(sf::implicit_plane(Vec3::Zero(), Vec3::UnitX()), chart), "not a graph here",
                         GeometryError);
  }
}
