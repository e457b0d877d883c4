#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "caplab/capillary.hpp"
#include "caplab/families.hpp"
#include "caplab/sigma.hpp"
#include "caplab/surfaces.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace caplab;
using namespace caplab::sigma;
using families::FamilyKind;
using geometry::ConformalChart;

namespace {

double form(const Mat2& s, double t) {
  const Vec2 d(std::cos(t), std::sin(t));
  return d.dot(s * d);
}

bool same_line(double a, double b, double tol) { return std::abs(std::remainder(a - b, M_PI)) < tol; }

bool same_pair(DirectionPair p, double a, double b, double tol = 1e-12) {
  return (same_line(p.first, a, tol) && same_line(p.second, b, tol)) ||
         (same_line(p.first, b, tol) && same_line(p.second, a, tol));
}

// Eigenvalues of I^{-1} sigma from the characteristic polynomial.
std::pair<double, double> generalized_eigenvalues(const Mat2& s, const Mat2& I) {
  const double a = I.determinant();
  const double b = -(s(0, 0) * I(1, 1) + s(1, 1) * I(0, 0) - 2.0 * s(0, 1) * I(0, 1));
  const double c = s.determinant();
  const double disc = std::sqrt(b * b - 4 * a * c);
  return {(-b + disc) / (2 * a), (-b - disc) / (2 * a)};
}

Mat2 random_spd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 m;
  m << u(rng), u(rng), u(rng), u(rng);
  return m * m.transpose() + 0.2 * Mat2::Identity();
}

Mat2 random_lorentzian(std::mt19937_64& rng, const Mat2& I) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Mat2 s;
    s(0, 0) = u(rng), s(1, 1) = u(rng), s(0, 1) = s(1, 0) = u(rng);
    if (s.determinant() / I.determinant() < -1e-3) return s;
  }
}

}  // namespace

TEST_CASE("sigma of graphs against planes") {
  const auto euc = ConformalChart::euclidean();
  const auto planes = FamilyKind::planes();
  const auto saddle = surfaces::graph_patch(surfaces::Frame{}, surfaces::saddle_height(), 0.5);
  const Mat2 s = sigma_at(euc, saddle.param, planes, 0.0, 0.0);
  CHECK((s - Mat2(Eigen::Vector2d(1, -1).asDiagonal())).norm() < 1e-10);

  const auto uv = surfaces::graph_patch(surfaces::Frame{}, surfaces::product_height(1.0), 0.5);
  Mat2 expected;
  expected << 0, 1, 1, 0;
  CHECK((sigma_at(euc, uv.param, planes, 0.0, 0.0) - expected).norm() < 1e-10);

  // Away from the origin: II of the graph, the member being its tangent plane.
  const auto h = surfaces::saddle_height();
  for (double u : {0.2, -0.3})
    for (double v : {0.1, 0.35}) {
      const Mat2 ref = oracle::graph_second_form(h.gradient(u, v), h.hessian(u, v));
      CHECK((sigma_at(euc, saddle.param, planes, u, v) - ref).norm() < 1e-10);
    }
}

TEST_CASE("sigma vanishes on a member") {
  const auto cap = capillary::nitsche_cap(1.5, M_PI / 3).patch;
  const auto fam = FamilyKind::cmc_spheres(1.5);
  for (double u : {0.3, 0.6})
    for (double v : {0.0, 2.0}) CHECK(sigma_at(ConformalChart::euclidean(), cap.param, fam, u, v).norm() < 1e-10);
}

TEST_CASE("chart and family must agree") {
  const auto saddle = surfaces::graph_patch(surfaces::Frame{}, surfaces::saddle_height(), 0.5);
  CHECK_THROWS_AS(sigma_at(ConformalChart::sphere3(), saddle.param, FamilyKind::planes(), 0, 0), GeometryError);
}

TEST_CASE("frame covariance") {
  // Graph route with two unrelated first axes against the level-set route.
  std::mt19937_64 rng(31);
  surfaces::Frame fr;
  fr.origin = Vec3(0.1, -0.2, 0.05);
  const auto patch = surfaces::graph_patch(fr, surfaces::harmonic_height(3, {0.7, -0.4}), 0.5);
  struct Case {
    ConformalChart chart;
    FamilyKind kind;
  };
  for (const auto& c : {Case{ConformalChart::euclidean(), FamilyKind::planes()},
                        Case{ConformalChart::euclidean(), FamilyKind::cmc_spheres(0.8)},
                        Case{ConformalChart::sphere3(), FamilyKind::equators_s3()},
                        Case{ConformalChart::euclidean(),
                             FamilyKind::translated_ovaloid(families::Ovaloid::prolate(0.7, 1.3))}}) {
    CAPTURE(c.kind.describe());
    for (double u : {0.2, -0.3})
      for (double v : {0.15, -0.25}) {
        const Mat2 s = sigma_at(c.chart, patch.param, c.kind, u, v);
        const Mat2 g1 = sigma_via_graph(c.chart, patch.param, c.kind, u, v, oracle::random_unit(rng));
        const Mat2 g2 = sigma_via_graph(c.chart, patch.param, c.kind, u, v, oracle::random_unit(rng));
        CHECK((s - g1).norm() < 1e-8);
        CHECK((g1 - g2).norm() < 1e-8);
      }
  }
}

TEST_CASE("asymptotic directions") {
  const Mat2 I = Mat2::Identity();
  CHECK(same_pair(asymptotic_directions(Mat2(Eigen::Vector2d(1, -1).asDiagonal()), I), M_PI / 4, 3 * M_PI / 4));
  Mat2 off;
  off << 0, 1, 1, 0;
  CHECK(same_pair(asymptotic_directions(off, I), 0.0, M_PI / 2));
  try {
    asymptotic_directions(I, I);
    FAIL("expected signature error");
  } catch (const SigmaError& e) {
    CHECK(e.kind() == SigmaError::Kind::signature);
  }
  try {
    asymptotic_directions(Mat2::Zero(), I, 1e-10);
    FAIL("expected singular error");
  } catch (const SigmaError& e) {
    CHECK(e.kind() == SigmaError::Kind::singular);
  }

  std::mt19937_64 rng(37);
  for (int i = 0; i < 500; ++i) {
    const Mat2 g = random_spd(rng);
    const Mat2 s = random_lorentzian(rng, g);
    const auto d = asymptotic_directions(s, g);
    CHECK(d.first >= 0.0);
    CHECK(d.first < M_PI);
    CHECK(d.second >= 0.0);
    CHECK(d.second < M_PI);
    CHECK(!same_line(d.first, d.second, 1e-6));
    CHECK(std::abs(form(s, d.first)) < 1e-10 * s.norm());
    CHECK(std::abs(form(s, d.second)) < 1e-10 * s.norm());
  }
}

TEST_CASE("principal directions") {
  const Mat2 I = Mat2::Identity();
  CHECK(same_pair(principal_directions(Mat2(Eigen::Vector2d(1, -1).asDiagonal()), I), 0.0, M_PI / 2));
  Mat2 off;
  off << 0, 1, 1, 0;
  CHECK(same_pair(principal_directions(off, I), M_PI / 4, 3 * M_PI / 4));

  std::mt19937_64 rng(41);
  for (int i = 0; i < 500; ++i) {
    const Mat2 g = random_spd(rng);
    const Mat2 s = random_lorentzian(rng, g);
    const auto p = principal_directions(s, g);
    const Vec2 e1(std::cos(p.first), std::sin(p.first)), e2(std::cos(p.second), std::sin(p.second));
    // I-orthogonal, and eigenvalue order from the characteristic polynomial.
    CHECK(std::abs(e1.dot(g * e2)) < 1e-10 * g.norm());
    const auto [k1, k2] = generalized_eigenvalues(s, g);
    CHECK(form(s, p.first) / form(g, p.first) == doctest::Approx(k1).epsilon(1e-9));
    CHECK(form(s, p.second) / form(g, p.second) == doctest::Approx(k2).epsilon(1e-9));
    // Asymptotic lines bisect the principal ones in the metric I.
    const auto a = asymptotic_directions(s, g);
    const double b1 = metric_line_angle(a.first, p.first, g), b2 = metric_line_angle(a.first, p.second, g);
    const double c1 = metric_line_angle(a.second, p.first, g), c2 = metric_line_angle(a.second, p.second, g);
    CHECK(std::abs(b1 - c1) < 1e-10);
    CHECK(std::abs(b2 - c2) < 1e-10);
    CHECK(b1 + b2 == doctest::Approx(M_PI / 2).epsilon(1e-12));
  }
}

TEST_CASE("metric line angle") {
  CHECK(metric_line_angle(0.0, M_PI / 2, Mat2::Identity()) == doctest::Approx(M_PI / 2));
  CHECK(metric_line_angle(0.1, 0.1 + M_PI, Mat2::Identity()) == doctest::Approx(0.0));
  Mat2 g;
  g << 4, 0, 0, 1;
  // (1,0) and (1,2) have lengths 2 and 2*sqrt(2); inner product 4.
  CHECK(metric_line_angle(0.0, std::atan2(2.0, 1.0), g) == doctest::Approx(M_PI / 4).epsilon(1e-14));
}

TEST_CASE("leading harmonic jet") {
  SUBCASE("exact mode") {
    const std::complex<double> a(1.0, 2.0);
    const auto jet = leading_harmonic_jet([&](double u, double v) { return std::real(a * std::pow(std::complex<double>(u, v), 4)); });
    REQUIRE(jet.status == HarmonicJet::Status::ok);
    CHECK(jet.n == 4);
    CHECK(std::abs(jet.alpha - a) < 1e-10);
  }
  SUBCASE("perturbed cubic") {
    auto d = [](double u, double v) {
      const std::complex<double> z(u, v);
      return std::real(z * z * z) + 0.01 * std::real(std::pow(z, 5));
    };
    const auto jet = leading_harmonic_jet(d);
    REQUIRE(jet.status == HarmonicJet::Status::ok);
    CHECK(jet.n == 3);
    // Taylor coefficient: c_3(rho) / rho^3 at a tiny radius.
    const double rho = 1e-3;
    const auto taylor = oracle::fourier(d, rho, 3) / std::pow(rho, 3);
    CHECK(std::abs(jet.alpha - taylor) < 1e-8);
    CHECK(std::abs(jet.alpha - 1.0) < 1e-8);
  }
  SUBCASE("zero") {
    const auto jet = leading_harmonic_jet([](double, double) { return 0.0; });
    CHECK(jet.status == HarmonicJet::Status::zero);
    CHECK(to_string(jet.status).find("zero") != std::string::npos);
  }
  SUBCASE("non-harmonic leading term") {
    const auto jet = leading_harmonic_jet([](double u, double v) { return u * u + v * v; });
    CHECK(jet.status == HarmonicJet::Status::mismatch);
  }
}

TEST_CASE("harmonic hessian") {
  const std::complex<double> a(0.3, -1.1);
  const double u = 0.4, v = -0.7, h = 1e-4;
  auto w = [&](double x, double y) { return std::real(a * std::pow(std::complex<double>(x, y), 5)); };
  const Mat2 H = harmonic_hessian(5, a, u, v);
  CHECK(H(0, 0) == doctest::Approx((w(u + h, v) - 2 * w(u, v) + w(u - h, v)) / (h * h)).epsilon(1e-6));
  CHECK(H(0, 1) ==
        doctest::Approx((w(u + h, v + h) - w(u + h, v - h) - w(u - h, v + h) + w(u - h, v - h)) / (4 * h * h))
            .epsilon(1e-6));
  CHECK(std::abs(H.trace()) < 1e-12);
}

TEST_CASE("model consistency") {
  const auto euc = ConformalChart::euclidean();
  const auto planes = FamilyKind::planes();
  const auto patch = surfaces::graph_patch(surfaces::Frame{}, surfaces::harmonic_height(3, 1.0), 0.5);
  const auto h = surfaces::harmonic_height(3, 1.0);
  const auto jet = leading_harmonic_jet(h.value);
  REQUIRE(jet.n == 3);
  auto fn = [&](double u, double v) { return sigma_at(euc, patch.param, planes, u, v); };
  const std::vector<double> radii{4e-2, 2e-2, 1e-2};
  const auto mc = sigma_model_consistency(fn, jet, 1.0, radii);
  CHECK(mc.decreasing());
  CHECK(mc.last_ratio() < 0.1);

  const auto flipped = sigma_model_consistency(fn, jet, -1.0, radii);
  CHECK(flipped.residuals.back() > 1.0);
  CHECK(flipped.last_ratio() > 0.9);

  const auto zero = sigma_model_consistency(fn, leading_harmonic_jet([](double, double) { return 0.0; }), 1.0, radii);
  CHECK(zero.vacuous);
}

TEST_CASE("normalization by the first form") {
  std::mt19937_64 rng(43);
  const Mat2 g = random_spd(rng);
  const Mat2 s = random_lorentzian(rng, g);
  const Mat2 n = normalize_by_first_form(s, g);
  // Same eigenvalues as I^{-1} sigma.
  const Eigen::SelfAdjointEigenSolver<Mat2> es(n);
  const auto [k1, k2] = generalized_eigenvalues(s, g);
  CHECK(es.eigenvalues()(1) == doctest::Approx(k1).epsilon(1e-12));
  CHECK(es.eigenvalues()(0) == doctest::Approx(k2).epsilon(1e-12));
}

TEST_CASE("singularities on grids") {
  const auto euc = ConformalChart::euclidean();
  const auto planes = FamilyKind::planes();
  SUBCASE("cubic saddle has one singularity with n = 3") {
    const auto patch = surfaces::graph_patch(surfaces::Frame{}, surfaces::harmonic_height(3, 1.0), 0.5);
    const auto grid = sample_sigma_grid(euc, patch.param, planes, patch.rect, 41, 41);
    CHECK(grid.lorentz_violations == 0);
    const auto rep = sigma_singularities(grid);
    CHECK_FALSE(rep.non_isolated);
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].n == 3);
    CHECK(rep.points[0].twice_index == -1);
    CHECK(std::hypot(rep.points[0].u, rep.points[0].v) < 0.03);
  }
  SUBCASE("off-node zero of a quartic") {
    surfaces::Frame fr;
    fr.origin = Vec3(0.0, 0.0, 0.0);
    const auto h = surfaces::harmonic_height(4, 1.0);
    surfaces::HeightFunction shifted{[h](double u, double v) { return h.value(u - 0.013, v + 0.007); },
                                     [h](double u, double v) { return h.gradient(u - 0.013, v + 0.007); },
                                     [h](double u, double v) { return h.hessian(u - 0.013, v + 0.007); }};
    const auto patch = surfaces::graph_patch(fr, shifted, 0.5);
    const auto grid = sample_sigma_grid(euc, patch.param, planes, patch.rect, 40, 40);
    const auto rep = sigma_singularities(grid);
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].n == 4);
    CHECK(rep.points[0].cells == 0);
    CHECK(std::hypot(rep.points[0].u - 0.013, rep.points[0].v + 0.007) < 0.03);
  }
  SUBCASE("quadratic saddle is regular") {
    const auto patch = surfaces::graph_patch(surfaces::Frame{}, surfaces::harmonic_height(2, 1.0), 0.5);
    const auto rep = sigma_singularities(sample_sigma_grid(euc, patch.param, planes, patch.rect, 31, 31));
    CHECK(rep.points.empty());
    CHECK_FALSE(rep.non_isolated);
  }
  SUBCASE("a member is a non-isolated zero set") {
    const auto cap = capillary::nitsche_cap(1.5, M_PI / 3).patch;
    const auto grid = sample_sigma_grid(euc, cap.param, FamilyKind::cmc_spheres(1.5), cap.rect, 12, 12);
    const auto rep = sigma_singularities(grid);
    CHECK(rep.non_isolated);
    CHECK(rep.message.find("non-isolated") != std::string::npos);
  }
}

TEST_CASE("grid directions are undefined exactly on the singular set") {
  const auto patch = surfaces::graph_patch(surfaces::Frame{}, surfaces::harmonic_height(3, 1.0), 0.5);
  const auto grid =
      sample_sigma_grid(ConformalChart::euclidean(), patch.param, FamilyKind::planes(), patch.rect, 21, 21);
  for (int k = 0; k < grid.nu() * grid.nv(); ++k) {
    CHECK(bool(grid.singular[k]) == std::isnan(grid.theta1[k]));
    if (!grid.singular[k]) {
      CHECK(grid.theta1[k] >= 0.0);
      CHECK(grid.theta1[k] < M_PI);
      CHECK(std::abs(form(grid.sigma[k], grid.theta1[k])) < 1e-10 * grid.sigma[k].norm());
    }
  }
  const auto path = std::filesystem::temp_directory_path() / "caplab_sigma_grid.csv";
  write_sigma_csv(grid, path.string());
  std::ifstream f(path);
  std::string header, line;
  std::getline(f, header);
  CHECK(header == "u,v,sigma11,sigma12,sigma22,theta_L1,theta_L2,singular_flag");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 21 * 21);
  std::filesystem::remove(path);
}

TEST_CASE("boundary angle audit") {
  const auto half = domains::Domain::half_space();
  SUBCASE("free-boundary catenoid") {
    const auto cat = surfaces::implicit_catenoid(Vec3::Zero(), Vec3::UnitX(), 1.0);
    for (double x : {-0.6, 0.0, 0.35})
      for (double side : {1.0, -1.0}) {
        const auto rep = boundary_angle_audit(half, cat, FamilyKind::planes(), Vec3(x, side * std::cosh(x), 0));
        CHECK(rep.status == BoundaryAngleReport::Status::checked);
        CHECK(rep.mixed < 1e-7);
        CHECK(rep.pass(1e-6, 1e-4));
      }
  }
  SUBCASE("member point") {
    const auto cap = capillary::nitsche_cap(1.5, M_PI / 3);
    const auto rep = boundary_angle_audit(domains::Domain::unit_ball(), cap.patch.implicit,
                                          FamilyKind::cmc_spheres(1.5), cap.boundary_point(0.4));
    CHECK(rep.status == BoundaryAngleReport::Status::member_point);
    CHECK(rep.pass(1e-6, 1e-4));
  }
  SUBCASE("twisted graph violates alignment") {
    surfaces::Frame fr;
    fr.e1 = Vec3::UnitX();
    fr.e2 = Vec3::UnitZ();
    fr.n = -Vec3::UnitY();
    const auto twisted = surfaces::implicit_graph(fr, surfaces::product_height(-0.5));
    const auto rep = boundary_angle_audit(half, twisted, FamilyKind::planes(), Vec3(0.2, 0, 0));
    CHECK(rep.status == BoundaryAngleReport::Status::checked);
    CHECK(rep.mixed > 0.1);
    CHECK_FALSE(rep.pass(1e-6, 1e-4));
  }
  SUBCASE("tangential contact") {
    const auto flat = surfaces::implicit_plane(Vec3::Zero(), Vec3::UnitZ());
    const auto rep = boundary_angle_audit(half, flat, FamilyKind::planes(), Vec3::Zero());
    CHECK(rep.status == BoundaryAngleReport::Status::not_transversal);
  }
}
