#include <random>

#include "caplab/capillary.hpp"
#include "caplab/surfaces.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace caplab;
using namespace caplab::capillary;

namespace {

const domains::Domain kBall = domains::Domain::unit_ball();

// t tanh t = 1 by bisection, then the neck from |X| = 1 at the rim.
std::pair<double, double> catenoid_oracle() {
  double lo = 0.5, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::tanh(mid) < 1.0 ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return {1.0 / std::sqrt(std::cosh(t) * std::cosh(t) + t * t), t};
}

const double kAlphas[] = {M_PI / 6, M_PI / 3, M_PI / 2, 2 * M_PI / 3, 5 * M_PI / 6};
const double kCurvatures[] = {0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5, 3.0, -3.0};

const Check* find_check(const ScenarioResult& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("contact angle examples") {
  SUBCASE("equatorial plane") {
    const auto plane = surfaces::implicit_plane(Vec3::Zero(), Vec3::UnitZ());
    for (double phi : {0.0, 1.0, 4.0}) {
      const auto c = contact_angle(kBall, plane, Vec3(std::cos(phi), std::sin(phi), 0));
      CHECK(c.alpha == doctest::Approx(M_PI / 2).epsilon(1e-14));
      CHECK(c.gap < 1e-12);
    }
  }
  SUBCASE("sphere against the unit sphere") {
    const double d = 0.5, R = 0.8;
    const Vec3 C(0, 0, d);
    const auto s = surfaces::implicit_sphere(C, R, +1);
    // Rim height from |x| = 1, |x - C| = R.
    const double z = (1.0 + d * d - R * R) / (2.0 * d), rho = std::sqrt(1.0 - z * z);
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k < 24; ++k) {
      const double phi = 2 * M_PI * k / 24;
      const Vec3 x(rho * std::cos(phi), rho * std::sin(phi), z);
      const auto c = contact_angle(kBall, s, x);
      CHECK(std::cos(c.alpha) == doctest::Approx(x.dot((x - C) / R)).epsilon(1e-12));
      CHECK(c.gap < 1e-9);
      lo = std::min(lo, c.alpha), hi = std::max(hi, c.alpha);
    }
    CHECK(hi - lo < 1e-9);
  }
  SUBCASE("catenoid with axis in the boundary plane") {
    const auto half = domains::Domain::half_space();
    const auto cat = surfaces::implicit_catenoid(Vec3::Zero(), Vec3::UnitX(), 1.0);
    for (double x : {-0.7, 0.0, 0.4}) {
      const auto c = contact_angle(half, cat, Vec3(x, std::cosh(x), 0));
      CHECK(c.alpha == doctest::Approx(M_PI / 2).epsilon(1e-9));
    }
  }
  SUBCASE("tangential contact is an error") {
    const auto touching = surfaces::implicit_sphere(Vec3(0, 0, 0.5), 0.5, +1);
    CHECK_THROWS_WITH_AS(contact_angle(kBall, touching, Vec3(0, 0, 1)), "tangential intersection", GeometryError);
  }
}

TEST_CASE("angle pairings agree on every cap rim") {
  for (double H : kCurvatures)
    for (double a : kAlphas) {
      NitscheCap cap;
      try {
        cap = nitsche_cap(H, a);
      } catch (const std::invalid_argument&) {
        continue;
      }
      for (double phi : {0.0, 2.0, 5.0}) {
        const auto c = contact_angle(kBall, cap.patch.implicit, cap.boundary_point(phi));
        CHECK(std::abs(c.cos_normals - c.cos_conormals) < 1e-9);
        CHECK(c.alpha == doctest::Approx(a).epsilon(1e-10));
      }
    }
  // Curved chart: equators against two caps.
  const double r = 0.6;
  const auto caps = domains::Domain::s3_two_caps(r);
  std::mt19937_64 rng(3);
  int seen = 0;
  for (int i = 0; i < 50 && seen < 5; ++i) {
    const auto m = families::member(families::FamilyKind::equators_s3(), 0.3 * oracle::random_unit(rng),
                                    oracle::random_unit(rng));
    const auto t = families::intersection_topology(m, caps);
    if (t.topology != families::Topology::annulus || std::abs(t.distance_north - r) < 0.05) continue;
    for (const Vec3& x : families::boundary_intersection(m.implicit, caps, 32)) {
      const auto c = contact_angle(caps, m.implicit, x);
      CHECK(std::abs(c.cos_normals - c.cos_conormals) < 1e-9);
    }
    ++seen;
  }
  CHECK(seen == 5);
}

TEST_CASE("Nitsche cap geometry") {
  SUBCASE("disk") {
    const auto cap = nitsche_cap(0.0, M_PI / 3);
    CHECK(cap.boundary_height == doctest::Approx(std::cos(M_PI / 3)));
    CHECK(cap.boundary_point(0.7).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (double H : {1.5, -1.5, 0.5})
    for (double a : {M_PI / 3, 2 * M_PI / 3}) {
      const auto cap = nitsche_cap(H, a);
      CHECK(cap.radius == doctest::Approx(1.0 / std::abs(H)));
      for (double phi : {0.0, 1.0, 3.0}) {
        const Vec3 x = cap.boundary_point(phi);
        CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK((x - Vec3(0, 0, cap.distance)).norm() == doctest::Approx(cap.radius).epsilon(1e-13));
      }
      // Mean curvature of the parametrized patch with its orientation.
      const auto& p = cap.patch;
      const double u = 0.5 * (p.rect.u0 + p.rect.u1), v = 0.3;
      const auto k = geometry::mean_and_principal_curvatures(
          geometry::fundamental_forms(geometry::ConformalChart::euclidean(), p.param, u, v));
      CHECK(k.mean == doctest::Approx(H).epsilon(1e-8));
    }
  CHECK_THROWS_AS(nitsche_cap(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nitsche_cap(1.0, M_PI), std::invalid_argument);
}

TEST_CASE("boundary residual") {
  SUBCASE("plane through the center") {
    const auto plane = surfaces::implicit_plane(Vec3::Zero(), Vec3::UnitZ());
    const auto rep = boundary_residual_at(kBall, plane, Vec3(1, 0, 0), M_PI / 2);
    CHECK(rep.max_abs < 1e-12);
    CHECK(rep.v.size() == 5);
  }
  SUBCASE("cap with H = 1.5, alpha = pi/3") {
    const auto cap = nitsche_cap(1.5, M_PI / 3);
    const auto good = boundary_residual_at(kBall, cap.patch.implicit, cap.boundary_point(0.4), M_PI / 3);
    CHECK(good.max_abs < 1e-8);
    const auto bad = boundary_residual_at(kBall, cap.patch.implicit, cap.boundary_point(0.4), M_PI / 3 + 0.1);
    CHECK(bad.max_abs > 1e-3);
  }
}

TEST_CASE("cos^2 closed form") {
  SUBCASE("free boundary: both sides vanish") {
    const auto plane = surfaces::implicit_plane(Vec3::Zero(), Vec3::UnitZ());
    const auto rep = cos2_formula_check(kBall, plane, {Vec3(1, 0, 0), Vec3(0, -1, 0)});
    for (const auto& s : rep.samples) {
      CHECK(std::abs(s.closed_form) < 1e-14);
      CHECK(std::abs(s.direct) < 1e-14);
    }
  }
  SUBCASE("caps across five angles") {
    for (double a : kAlphas) {
      const auto cap = nitsche_cap(1.0, a);
      std::vector<Vec3> pts;
      for (double phi : {0.0, 1.5, 3.0}) pts.push_back(cap.boundary_point(phi));
      const auto rep = cos2_formula_check(kBall, cap.patch.implicit, pts);
      CHECK(rep.max_rel_error < 1e-10);
      CHECK(rep.samples.front().direct == doctest::Approx(std::cos(a) * std::cos(a)).epsilon(1e-10));
    }
  }
  SUBCASE("equator meeting a cap of S^3") {
    const double r = 0.6;
    const auto caps = domains::Domain::s3_two_caps(r);
    std::mt19937_64 rng(7);
    int seen = 0;
    for (int i = 0; i < 60 && seen < 4; ++i) {
      const auto m = families::member(families::FamilyKind::equators_s3(), 0.3 * oracle::random_unit(rng),
                                      oracle::random_unit(rng));
      const auto t = families::intersection_topology(m, caps);
      if (t.topology != families::Topology::annulus || std::abs(t.distance_north - r) < 0.05) continue;
      auto pts = families::boundary_intersection(m.implicit, caps, 16);
      if (pts.size() > 4) pts.resize(4);
      const auto rep = cos2_formula_check(caps, m.implicit, pts);
      CHECK(rep.max_rel_error < 1e-8);
      ++seen;
    }
    CHECK(seen == 4);
  }
}

TEST_CASE("Nitsche scenario over the admissible grid") {
  int admissible = 0;
  for (double H : kCurvatures)
    for (double a : kAlphas) {
      CAPTURE(H);
      CAPTURE(a);
      const auto res = nitsche_scenario(H, a);
      if (res.verdict == Verdict::degenerate) continue;
      ++admissible;
      CHECK(res.verdict == Verdict::pass);
      CHECK(res.conclusion == "member of transitive family");
      for (const auto& c : res.checks) {
        CAPTURE(c.name);
        CHECK(c.pass);
      }
    }
  CHECK(admissible >= 25);
}

TEST_CASE("Nitsche negative controls") {
  NitscheOptions bump;
  bump.bump = 1e-3;
  const auto b = nitsche_scenario(1.5, M_PI / 3, bump);
  CHECK(b.verdict == Verdict::fail);
  CHECK(b.conclusion == "not a member");
  CHECK_FALSE(find_check(b, "max_sigma")->pass);

  NitscheOptions wrong;
  wrong.alpha_claimed = M_PI / 3 + 0.1;
  const auto w = nitsche_scenario(1.5, M_PI / 3, wrong);
  CHECK(w.verdict == Verdict::fail);
  CHECK(find_check(w, "boundary_residual")->value > 1e-3);

  const auto flat_bump = nitsche_scenario(0.0, M_PI / 2, bump);
  CHECK(flat_bump.verdict == Verdict::fail);
}

TEST_CASE("critical catenoid") {
  const auto [a_ref, t_ref] = catenoid_oracle();
  // Frozen from the bisection oracle.
  CHECK(a_ref == doctest::Approx(0.460485088250134).epsilon(1e-14));
  CHECK(t_ref == doctest::Approx(1.199678640257734).epsilon(1e-14));
  const auto neck = critical_catenoid_neck();
  CHECK(std::abs(neck.a - 0.460485088250134) < 1e-12);
  CHECK(std::abs(neck.t - 1.199678640257734) < 1e-12);
  CHECK(neck.iterations <= 10);
  CHECK(catenoid_exit_parameter(neck.a) == doctest::Approx(neck.t).epsilon(1e-12));
  // The rim lies on the unit sphere with the position vector tangent to the catenoid.
  const double a = neck.a, t = neck.t;
  CHECK(std::hypot(a * t, a * std::cosh(t)) == doctest::Approx(1.0).epsilon(1e-13));
  const Vec2 pos(a * t, a * std::cosh(t)), tangent(1.0, std::sinh(t));
  CHECK(std::abs(pos.normalized().dot(tangent.normalized())) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("annulus scenario") {
  AnnulusOptions opt;
  opt.grid = 60;
  const auto good = annulus_scenario(opt);
  CHECK(good.verdict == Verdict::pass);
  for (const auto& c : good.checks) {
    CAPTURE(c.name);
    CHECK(c.pass);
  }
  CHECK(find_check(good, "umbilics")->value == 0.0);

  opt.input = AnnulusInput::squeezed_catenoid;
  const auto squeezed = annulus_scenario(opt);
  CHECK(squeezed.verdict == Verdict::fail);
  CHECK_FALSE(find_check(squeezed, "free_boundary_angle_error")->pass);

  opt.input = AnnulusInput::sphere_cap;
  CHECK(annulus_scenario(opt).verdict == Verdict::degenerate);
}

TEST_CASE("free-boundary catenoid scenario") {
  const auto good = free_boundary_catenoid_scenario();
  CHECK(good.verdict == Verdict::pass);
  CHECK(find_check(good, "max_mixed_derivative")->value < 1e-7);
  CHECK(find_check(good, "seam_c0_gap")->value < 1e-5);
  CHECK(find_check(good, "seam_derivative_gap")->value < 1e-5);

  FreeBoundaryOptions swap;
  swap.swap_branches = true;
  const auto s = free_boundary_catenoid_scenario(swap);
  CHECK(s.verdict == Verdict::fail);
  CHECK(s.conclusion == "capillary alignment violated");

  FreeBoundaryOptions twist;
  twist.twist = 0.5;
  const auto t = free_boundary_catenoid_scenario(twist);
  CHECK(t.verdict == Verdict::fail);
  CHECK_FALSE(find_check(t, "max_mixed_derivative")->pass);
}

TEST_CASE("Weingarten family checks") {
  WeingartenOptions sphere;
  sphere.relation = "constant_mean";
  sphere.constant = 2.0;
  CHECK(weingarten_family_check(families::Ovaloid::round_sphere(), sphere).verdict == Verdict::pass);

  const auto prolate = weingarten_family_check(families::Ovaloid::prolate(0.7, 1.3));
  CHECK(prolate.verdict == Verdict::pass);
  CHECK(find_check(prolate, "member_angle_spread")->value < 1e-8);

  const auto dumbbell = weingarten_family_check(families::Ovaloid::dumbbell(0.6));
  CHECK(dumbbell.verdict == Verdict::fail);
  CHECK(dumbbell.conclusion.find("rejected") != std::string::npos);
}

TEST_CASE("S^3 scans never produce disks") {
  for (double r : {0.3, 0.6, 1.2})
    for (unsigned long long seed : {1ULL, 42ULL, 2024ULL}) {
      const auto rep = s3_nonexistence_scan(r, 1000, seed, 2);
      CHECK(rep.disks == 0);
      CHECK(rep.samples == 1000);
      CHECK(rep.spheres + rep.annuli + rep.degenerate == 1000);
      CHECK(rep.max_angle_spread < 1e-8);
    }
  const auto wide = s3_nonexistence_scan(1.5, 1000);
  CHECK(wide.annulus_fraction() > 0.99);
  CHECK(s3_scan_scenario(0.6, 1000).verdict == Verdict::pass);
  CHECK(families::intersection_topology(Vec4::UnitW(), 0.6).topology == families::Topology::sphere);
  CHECK_THROWS_AS(s3_nonexistence_scan(0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(s3_nonexistence_scan(M_PI / 2, 10), std::invalid_argument);
}

TEST_CASE("scan fraction matches the spherical measure") {
  // P(|<a, pole>| < sin r) for a uniform on S^3: (2/pi)(r' + sin r' cos r') with r' = asin(sin r) = r.
  const double r = 0.6;
  const auto rep = s3_nonexistence_scan(r, 20000, 5, 0);
  const double expected = (2.0 / M_PI) * (r + std::sin(r) * std::cos(r));
  CHECK(rep.annulus_fraction() == doctest::Approx(expected).epsilon(0.02));
}
