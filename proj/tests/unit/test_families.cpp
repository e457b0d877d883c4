#include <random>

#include "caplab/domains.hpp"
#include "caplab/families.hpp"
#include "caplab/geometry.hpp"
#include "caplab/surfaces.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace caplab;
using namespace caplab::families;

TEST_CASE("members through a pointed plane") {
  SUBCASE("plane") {
    const auto m = member(FamilyKind::planes(), Vec3::Zero(), Vec3::UnitZ());
    for (const Vec3& x : {Vec3(1, 2, 0), Vec3(-3, 0.5, 0)}) CHECK(std::abs(m.implicit.value(x)) < 1e-15);
    CHECK(m.implicit.value(Vec3(0, 0, 1)) > 0.0);
  }
  SUBCASE("cmc sphere") {
    const auto m = member(FamilyKind::cmc_spheres(1.0), Vec3::Zero(), Vec3::UnitZ());
    CHECK((m.descriptor.center - Vec3(0, 0, 1)).norm() < 1e-15);
    CHECK(m.descriptor.radius == doctest::Approx(1.0));
    const auto par = m.parametrization();
    for (double u : {0.4, 1.3, 2.5})
      for (double v : {0.2, 3.0}) {
        const auto k = geometry::mean_and_principal_curvatures(
            geometry::fundamental_forms(geometry::ConformalChart::euclidean(), par, u, v));
        CHECK(k.mean == doctest::Approx(1.0).epsilon(1e-9));
      }
  }
  SUBCASE("equator through the origin") {
    const auto m = member(FamilyKind::equators_s3(), Vec3::Zero(), Vec3::UnitZ());
    const Vec4 a = m.descriptor.pole;
    CHECK(std::abs(std::abs(a(2)) - 1.0) < 1e-12);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> box(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
      const Vec3 x(box(rng), box(rng), 0.0);
      CHECK(std::abs(geometry::s3_lift(x).point.dot(a)) < 1e-14);
      CHECK(std::abs(m.implicit.value(x)) < 1e-14);
    }
  }
}

TEST_CASE("transitivity for every family") {
  for (const auto& kind : {FamilyKind::planes(), FamilyKind::cmc_spheres(2.0), FamilyKind::cmc_spheres(-0.7),
                           FamilyKind::equators_s3(), FamilyKind::translated_ovaloid(Ovaloid::prolate(0.7, 1.3))}) {
    CAPTURE(kind.describe());
    const auto rep = transitivity_audit(kind, 100);
    CHECK(rep.samples == 100);
    CHECK(rep.passed == 100);
    CHECK(rep.max_value_at_p < 1e-10);
    CHECK(rep.max_normal_angle < 1e-8);
    if (!rep.failures.empty()) MESSAGE(rep.failures.front());
  }
}

TEST_CASE("H = 0 delegates to planes") { CHECK(FamilyKind::cmc_spheres(0.0).tag == FamilyTag::planes); }

TEST_CASE("members of cmc_spheres have constant mean curvature H") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0), v(0.0, 2.0 * M_PI);
  for (double H : {1.0, -2.0, 0.3}) {
    const Vec3 p(0.2, -0.1, 0.4);
    const Vec3 nu = oracle::random_unit(rng);
    const auto m = member(FamilyKind::cmc_spheres(H), p, nu);
    const auto par = m.parametrization();
    for (int i = 0; i < 100; ++i) {
      const auto k = geometry::mean_and_principal_curvatures(
          geometry::fundamental_forms(geometry::ConformalChart::euclidean(), par, u(rng), v(rng)));
      CHECK(std::abs(k.mean - H) < 1e-9);
    }
    // Mean curvature vector along +nu at p: the center lies on the nu side for H > 0.
    CHECK((m.descriptor.center - p).dot(nu) * H > 0.0);
  }
}

TEST_CASE("equators are totally geodesic") {
  std::mt19937_64 rng(7);
  const auto chart = geometry::ConformalChart::sphere3();
  for (int i = 0; i < 10; ++i) {
    const auto m = member(FamilyKind::equators_s3(), 0.5 * oracle::random_unit(rng), oracle::random_unit(rng));
    const auto par = m.parametrization();
    for (double u : {0.5, 1.5})
      for (double v : {0.3, 2.0}) {
        const auto f = geometry::fundamental_forms(chart, par, u, v);
        CHECK(f.second.norm() < 1e-6 * f.first.norm());
      }
  }
}

TEST_CASE("member graph in adapted charts") {
  const auto euc = geometry::ConformalChart::euclidean();
  SUBCASE("plane") {
    const auto m = member(FamilyKind::planes(), Vec3(0.1, 0.2, 0.3), Vec3(0, 1, 1));
    const auto chart = domains::interior_adapted_chart(euc, m.p, Vec3::UnitX(), m.nu);
    const auto h = member_graph(m, chart);
    for (double u : {-0.05, 0.0, 0.07}) CHECK(std::abs(h(u, 0.03)) < 1e-13);
  }
  SUBCASE("unit sphere has Hessian diag(1,1)") {
    const auto m = member(FamilyKind::cmc_spheres(1.0), Vec3::Zero(), Vec3::UnitZ());
    const auto chart = domains::interior_adapted_chart(euc, Vec3::Zero(), Vec3::UnitX(), Vec3::UnitZ());
    const auto d = member_graph(m, chart).derivatives(0.0, 0.0);
    CHECK(d.huu == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(d.hvv == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(d.huv) < 1e-8);
    // Graph of 1 - sqrt(1 - r^2) oracle.
    const double r2 = 0.05 * 0.05 + 0.02 * 0.02;
    CHECK(member_graph(m, chart)(0.05, 0.02) == doctest::Approx(1.0 - std::sqrt(1.0 - r2)).epsilon(1e-12));
  }
  SUBCASE("equator through the chart origin") {
    const auto s3 = geometry::ConformalChart::sphere3();
    const auto m = member(FamilyKind::equators_s3(), Vec3::Zero(), Vec3::UnitZ());
    const auto chart = domains::interior_adapted_chart(s3, Vec3::Zero(), Vec3::UnitX(), Vec3::UnitZ());
    const auto h = member_graph(m, chart);
    CHECK(std::abs(h(0.04, -0.06)) < 1e-13);
  }
}

TEST_CASE("constant contact angle") {
  const auto ball = domains::Domain::unit_ball();
  SUBCASE("horizontal plane") {
    const auto rep = constant_angle_audit(member(FamilyKind::planes(), Vec3::Zero(), Vec3::UnitZ()), ball);
    CHECK(rep.intersects);
    CHECK(rep.transversal);
    CHECK(rep.min_angle == doctest::Approx(M_PI / 2).epsilon(1e-10));
    CHECK(rep.spread() < 1e-10);
  }
  SUBCASE("sphere of radius 0.8 about (0,0,0.5)") {
    const Vec3 c(0, 0, 0.5);
    const double R = 0.8;
    const auto s = surfaces::implicit_sphere(c, R, +1);
    const auto rep = constant_angle_audit(s, ball);
    REQUIRE(rep.intersects);
    CHECK(rep.spread() < 1e-9);
    // Direct normal computation at each intersection point.
    for (const auto& bp : rep.points) {
      const double cosang = ((bp.x - c) / R).dot(bp.x.normalized());
      CHECK(std::abs(std::cos(bp.angle) - cosang) < 1e-9);
      CHECK(std::abs(bp.x.norm() - 1.0) < 1e-10);
      CHECK(std::abs((bp.x - c).norm() - R) < 1e-10);
    }
    // Law of cosines in the triangle of the two centers and a boundary point.
    const double expected = (1.0 + R * R - 0.25) / (2.0 * R);
    CHECK(std::abs(std::cos(rep.min_angle)) == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("no intersection") {
    const auto rep = constant_angle_audit(surfaces::implicit_sphere(Vec3::Zero(), 0.5, +1), ball);
    CHECK_FALSE(rep.intersects);
  }
  SUBCASE("equator against two caps") {
    const double r = 0.6;
    const auto caps = domains::Domain::s3_two_caps(r);
    std::mt19937_64 rng(19);
    int checked = 0;
    for (int i = 0; i < 40 && checked < 5; ++i) {
      const auto m = member(FamilyKind::equators_s3(), 0.3 * oracle::random_unit(rng), oracle::random_unit(rng));
      const auto topo = intersection_topology(m, caps);
      if (topo.topology != Topology::annulus || std::abs(topo.distance_north - r) < 0.05) continue;
      const auto rep = constant_angle_audit(m, caps);
      REQUIRE(rep.intersects);
      CHECK(rep.spread() < 1e-8);
      ++checked;
    }
    CHECK(checked == 5);
  }
}

TEST_CASE("intersection topology") {
  const double r = 0.6;
  CHECK(intersection_topology(Vec4(1, 0, 0, 0), r).topology == Topology::annulus);
  CHECK(intersection_topology(Vec4(0, 0, 0, 1), r).topology == Topology::sphere);
  CHECK(intersection_topology(Vec4(0, 0, std::cos(r), std::sin(r)), r).topology == Topology::degenerate);

  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const Vec4 a = Vec4(g(rng), g(rng), g(rng), g(rng)).normalized();
    const auto t = intersection_topology(a, r);
    CHECK(t.distance_north == doctest::Approx(t.distance_south).epsilon(1e-14));
    CHECK(t.topology != Topology::degenerate);
    if (std::abs(t.distance_north - r) < 0.05) continue;
    const int circles = oracle::monte_carlo_circles(a, r);
    CHECK(circles != 1);
    CHECK((circles == 2) == (t.topology == Topology::annulus));
    ++compared;
  }
  CHECK(compared > 100);
}

TEST_CASE("graph operator ellipticity") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> j(-3.0, 3.0);
  std::vector<JetSample> jets;
  for (int i = 0; i < 1000; ++i) jets.push_back({j(rng), j(rng), j(rng), j(rng), j(rng), j(rng)});
  for (auto eq : {GraphEquation::minimal_graph, GraphEquation::cmc_graph}) {
    const auto rep = pde_ellipticity_audit(eq, 1.0, jets);
    CHECK(rep.pass());
    CHECK(rep.samples == 1000);
    for (const auto& s : jets) {
      const auto d = graph_operator_derivatives(eq, s);
      CHECK(4.0 * d.phi_r * d.phi_t - d.phi_s * d.phi_s ==
            doctest::Approx(4.0 * (1.0 + s.p * s.p + s.q * s.q)).epsilon(1e-12));
    }
    const auto z = graph_operator_derivatives(eq, {});
    CHECK(4.0 * z.phi_r * z.phi_t - z.phi_s * z.phi_s == doctest::Approx(4.0));
  }
  // Finite-difference check of the principal part.
  const JetSample s{0.3, 0.4, -0.7, 0.2, 0.1, -0.5};
  const auto d = graph_operator_derivatives(GraphEquation::cmc_graph, s);
  const double h = 1e-6;
  auto at = [&](double dr, double ds, double dt) {
    JetSample t = s;
    t.r += dr, t.s += ds, t.t += dt;
    return graph_operator(GraphEquation::cmc_graph, 1.0, t);
  };
  CHECK(d.phi_r == doctest::Approx((at(h, 0, 0) - at(-h, 0, 0)) / (2 * h)).epsilon(1e-8));
  CHECK(d.phi_s == doctest::Approx((at(0, h, 0) - at(0, -h, 0)) / (2 * h)).epsilon(1e-8));
  CHECK(d.phi_t == doctest::Approx((at(0, 0, h) - at(0, 0, -h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("Weingarten relations") {
  const auto c = WeingartenRelation::constant_mean(2.0);
  const auto rep = pde_ellipticity_audit(c, {Vec3(1, 1, 0.3), Vec3(0.5, 1.5, 2.0)});
  CHECK(rep.pass());
  CHECK(rep.min_product == doctest::Approx(1.0).epsilon(1e-8));

  const Ovaloid e = Ovaloid::prolate(0.7, 1.3);
  const auto mean = WeingartenRelation::induced(e, WeingartenRelation::Type::mean);
  const auto gauss = WeingartenRelation::induced(e, WeingartenRelation::Type::gauss);
  for (double th : {0.2, 0.9, 1.6, 2.7}) {
    const double k1 = e.meridian_curvature(th), k2 = e.parallel_curvature(th), eta = e.gauss_angle(th);
    CHECK(std::abs(mean(k1, k2, eta)) < 1e-8);
    CHECK(std::abs(gauss(k1, k2, eta)) < 1e-8);
  }
}

TEST_CASE("member construction is deterministic") {
  const auto kind = FamilyKind::translated_ovaloid(Ovaloid::prolate(0.6, 1.2));
  const Vec3 p(0.3, 0.1, -0.2), nu = Vec3(1, 2, 3).normalized();
  const auto a = member(kind, p, nu), b = member(kind, p, nu);
  CHECK(a.descriptor.distance(b.descriptor) == 0.0);
  CHECK(std::abs(a.implicit.value(p)) < 1e-10);
  CHECK((a.implicit.unit_normal(p) - nu).norm() < 1e-8);
}
