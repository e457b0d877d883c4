#include "caplab/capillary.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "caplab/index.hpp"

namespace caplab::capillary {

using families::FamilyKind;
using geometry::ConformalChart;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

// Pairs the conormal of Sigma (tangential part of the boundary normal) with
// the conormal of the contact curve inside the boundary.
double conormal_pairing(const ConformalChart& chart, const Vec3& x, const Vec3& x1, const Vec3& x2, const Vec3& ns,
                        const Vec3& nb, double c) {
  Mat2 G;
  G << chart.inner(x, x1, x1), chart.inner(x, x1, x2), chart.inner(x, x2, x1), chart.inner(x, x2, x2);
  const Vec2 b(chart.inner(x, nb, x1), chart.inner(x, nb, x2));
  const Vec2 coef = G.ldlt().solve(b);
  Vec3 nu_sigma = coef(0) * x1 + coef(1) * x2;
  nu_sigma /= chart.norm(x, nu_sigma);
  Vec3 nu_c = c * nb - ns;
  nu_c /= chart.norm(x, nu_c);
  return chart.inner(x, nu_sigma, nu_c);
}

ContactAngle finish(double c, double cc) {
  ContactAngle a;
  a.cos_normals = c;
  a.cos_conormals = cc;
  a.gap = std::abs(c - cc);
  a.alpha = std::acos(std::clamp(c, -1.0, 1.0));
  return a;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1);
  return out;
}

Vec3 boundary_tangent(const Domain& domain, const ImplicitSurface& s, const Vec3& p) {
  const Vec3 t = s.unit_normal(p).cross(domain.outward_unit(p));
  if (t.norm() < 1e-8) throw GeometryError("tangential intersection");
  return t.normalized();
}

}  // namespace

ContactAngle contact_angle(const Domain& domain, const ImplicitSurface& surface, const Vec3& x) {
  const ConformalChart& chart = domain.chart();
  const double lam = chart.lambda(x);
  const Vec3 ns = surface.unit_normal(x) / lam;
  const Vec3 nb = domain.outward_unit(x) / lam;
  const double c = chart.inner(x, ns, nb);
  if (1.0 - std::abs(c) < 1e-12) throw GeometryError("tangential intersection");
  const Vec3 t = ns.cross(nb).normalized();
  const Vec3 w = ns.cross(t).normalized();
  return finish(c, conormal_pairing(chart, x, t, w, ns, nb, c));
}

ContactAngle contact_angle(const Domain& domain, const geometry::SurfaceJet& jet, int orientation) {
  const ConformalChart& chart = domain.chart();
  const auto forms = geometry::fundamental_forms(chart, jet, orientation);
  const Vec3 nb = domain.outward_unit(jet.x) / chart.lambda(jet.x);
  const double c = chart.inner(jet.x, forms.normal, nb);
  if (1.0 - std::abs(c) < 1e-12) throw GeometryError("tangential intersection");
  return finish(c, conormal_pairing(chart, jet.x, jet.xu, jet.xv, forms.normal, nb, c));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::degenerate: return "degenerate";
  }
  return "?";
}

Check check_below(std::string name, double value, double tol, std::string note) {
  return {std::move(name), value, tol, value <= tol, std::move(note)};
}

Check check_above(std::string name, double value, double tol, std::string note) {
  return {std::move(name), value, tol, value >= tol, std::move(note)};
}

bool ScenarioResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void ScenarioResult::settle(const std::string& if_pass, const std::string& if_fail) {
  if (verdict == Verdict::degenerate) return;
  verdict = all_pass() ? Verdict::pass : Verdict::fail;
  conclusion = verdict == Verdict::pass ? if_pass : if_fail;
}

ResidualReport boundary_residual(const domains::GraphJet& h, const domains::BoundaryAdaptedChart& bc, double alpha,
                                 const std::vector<double>& vs) {
  ResidualReport rep;
  const Mat3 m0 = bc.chart.metric_coefficients(0.0, 0.0, h(0.0, 0.0));
  rep.scale = std::max(m0(0, 0), sq(bc.lambda_b(0.0, h(0.0, 0.0))));
  const double c2 = sq(std::cos(alpha)), s2 = sq(std::sin(alpha));
  for (double v : vs) {
    const auto d = h.refined_derivatives(0.0, v);
    const double z = h(0.0, v);
    const double guu = bc.chart.metric_coefficients(0.0, v, z)(0, 0);
    const double lb2 = sq(bc.lambda_b(v, z));
    const double r = (-guu * (1.0 + d.hv * d.hv) * c2 + lb2 * d.hu * d.hu * s2) / rep.scale;
    rep.v.push_back(v);
    rep.residual.push_back(r);
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
  }
  return rep;
}

ResidualReport boundary_residual_at(const Domain& domain, const ImplicitSurface& surface, const Vec3& p, double alpha,
                                    int nv, double v_max) {
  const auto bc = domains::boundary_adapted_chart(domain, p, boundary_tangent(domain, surface, p));
  const auto h = domains::graph_in_chart(surface, bc.chart, 0.05, 1e-3);
  return boundary_residual(h, bc, alpha, linspace(-v_max, v_max, nv));
}

Cos2Report cos2_formula_check(const Domain& domain, const ImplicitSurface& surface, const std::vector<Vec3>& pts) {
  Cos2Report rep;
  for (const Vec3& p : pts) {
    const auto bc = domains::boundary_adapted_chart(domain, p, boundary_tangent(domain, surface, p));
    const auto h = domains::graph_in_chart(surface, bc.chart, 0.05, 8e-3);
    const Vec2 d = h.gradient(0.0, 0.0);
    const Mat3 g = bc.chart.metric_coefficients(0.0, 0.0, h(0.0, 0.0));
    const double lam2 = g(1, 1);
    Cos2Sample s;
    s.x = p;
    s.closed_form = d(0) * d(0) * lam2 / (g(0, 0) + d(0) * d(0) * lam2 + d(1) * d(1) * g(0, 0));
    s.direct = sq(contact_angle(domain, surface, p).cos_normals);
    s.rel_error = std::abs(s.closed_form - s.direct) / std::max(s.direct, 1e-4);
    rep.max_rel_error = std::max(rep.max_rel_error, s.rel_error);
    rep.samples.push_back(s);
  }
  return rep;
}

Vec3 NitscheCap::boundary_point(double phi) const {
  return {boundary_radius * std::cos(phi), boundary_radius * std::sin(phi), boundary_height};
}

namespace {

surfaces::SurfacePatch disk_patch(double height, double radius, double eps) {
  surfaces::SurfacePatch p;
  p.name = eps == 0.0 ? "disk" : "bumped_disk";
  p.param = geometry::ParametricSurface::analytic([=](double r, double ph) {
    const double c = std::cos(ph), s = std::sin(ph), c3 = std::cos(3.0 * ph), s3 = std::sin(3.0 * ph);
    geometry::SurfaceJet j;
    j.x = Vec3(r * c, r * s, height + eps * r * r * r * c3);
    j.xu = Vec3(c, s, 3.0 * eps * r * r * c3);
    j.xv = Vec3(-r * s, r * c, -3.0 * eps * r * r * r * s3);
    j.xuu = Vec3(0.0, 0.0, 6.0 * eps * r * c3);
    j.xuv = Vec3(-s, c, -9.0 * eps * r * r * s3);
    j.xvv = Vec3(-r * c, -r * s, -9.0 * eps * r * r * r * c3);
    return j;
  });
  p.implicit = surfaces::implicit_plane(Vec3(0.0, 0.0, height), Vec3::UnitZ());
  p.rect = {0.02 * radius, radius, 0.0, 2.0 * M_PI};
  return p;
}

}  // namespace

NitscheCap nitsche_cap(double H, double alpha, double bump) {
  if (!(alpha > 0.0 && alpha < M_PI)) throw std::invalid_argument("contact angle must lie in (0, pi)");
  if (!std::isfinite(H)) throw std::invalid_argument("mean curvature must be finite");
  NitscheCap cap;
  cap.H = H;
  cap.alpha = alpha;
  if (H == 0.0) {
    cap.distance = cap.boundary_height = std::cos(alpha);
    cap.boundary_radius = std::sin(alpha);
    cap.patch = disk_patch(cap.distance, cap.boundary_radius, bump);
    return cap;
  }
  const double R = 1.0 / std::abs(H);
  // The normal points to the center for H > 0.
  const double d2 = 1.0 + R * R + (H > 0.0 ? 2.0 : -2.0) * R * std::cos(alpha);
  const double d = std::sqrt(std::max(0.0, d2));
  if (!(d > std::abs(1.0 - R) && d < 1.0 + R)) throw std::invalid_argument("cap does not meet the unit sphere");
  cap.radius = R;
  cap.distance = d;
  cap.theta_b = std::acos(std::clamp((d * d + R * R - 1.0) / (2.0 * d * R), -1.0, 1.0));
  cap.boundary_height = (1.0 + d * d - R * R) / (2.0 * d);
  cap.boundary_radius = std::sqrt(std::max(0.0, 1.0 - sq(cap.boundary_height)));
  const int orientation = H > 0.0 ? -1 : +1;
  const Vec3 center(0.0, 0.0, d);
  const double th0 = 0.02 * cap.theta_b;
  cap.patch = bump == 0.0 ? surfaces::sphere_patch(center, R, -Vec3::UnitZ(), th0, cap.theta_b, orientation)
                          : surfaces::bumped_sphere_patch(center, R, -Vec3::UnitZ(), th0, cap.theta_b, orientation, bump);
  return cap;
}

ScenarioResult nitsche_scenario(double H, double alpha, const NitscheOptions& opt) {
  ScenarioResult res;
  res.scenario = "nitsche";
  const double claimed = opt.alpha_claimed < 0.0 ? alpha : opt.alpha_claimed;
  res.params = {{"H", H}, {"alpha", alpha}, {"alpha_claimed", claimed}, {"bump", opt.bump}};
  NitscheCap cap;
  try {
    cap = nitsche_cap(H, alpha, opt.bump);
  } catch (const std::invalid_argument& e) {
    res.verdict = Verdict::degenerate;
    res.conclusion = std::string("inadmissible (H, alpha): ") + e.what();
    return res;
  }
  res.labels = {{"surface", cap.patch.name}, {"family", FamilyKind::cmc_spheres(H).describe()}};
  const Domain ball = Domain::unit_ball();
  const double curvature_scale = std::max(1.0, std::abs(H));

  res.grid = sigma::sample_sigma_grid(ball.chart(), cap.patch.param, FamilyKind::cmc_spheres(H), cap.patch.rect,
                                      opt.grid, opt.grid);
  res.checks.push_back(check_below("max_sigma", res.grid->max_norm / curvature_scale, opt.tol_sigma));

  double lo = kInf, hi = -kInf, gap = 0.0, residual = 0.0, mean = 0.0;
  for (int k = 0; k < opt.boundary_samples; ++k) {
    const Vec3 x = cap.boundary_point(2.0 * M_PI * k / opt.boundary_samples + 0.1);
    const ContactAngle a = contact_angle(ball, cap.patch.implicit, x);
    lo = std::min(lo, a.alpha);
    hi = std::max(hi, a.alpha);
    mean += a.alpha / opt.boundary_samples;
    gap = std::max(gap, a.gap);
    residual = std::max(residual, boundary_residual_at(ball, cap.patch.implicit, x, claimed).max_abs);
  }
  res.checks.push_back(check_below("boundary_residual", residual, opt.tol_residual));
  res.checks.push_back(check_below("angle_spread", hi - lo, opt.tol_spread));
  res.checks.push_back(check_below("angle_error", std::abs(mean - claimed), 1e-9));
  res.checks.push_back(check_below("pairing_gap", gap, 1e-9));
  res.settle("member of transitive family", "not a member");
  return res;
}

double catenoid_exit_parameter(double a) {
  if (!(a > 0.0 && a < 1.0)) throw GeometryError("catenoid neck must lie in (0, 1)");
  auto f = [a](double t) { return a * a * (sq(std::cosh(t)) + t * t) - 1.0; };
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  boost::uintmax_t iters = 200;
  const auto [l, r] = boost::math::tools::toms748_solve(f, 0.0, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (l + r);
}

CatenoidNeck critical_catenoid_neck(double a0) {
  // Orthogonality at the sphere: the meridian tangent is parallel to the position.
  auto F = [](double a) {
    const double t = catenoid_exit_parameter(a);
    return t * std::tanh(t) - 1.0;
  };
  CatenoidNeck out;
  double a = a0;
  for (; out.iterations < 60; ++out.iterations) {
    const double fa = F(a);
    if (std::abs(fa) < 1e-15) break;
    const double h = 1e-7 * a;
    const double step = fa / ((F(a + h) - F(a - h)) / (2.0 * h));
    a -= step;
    if (!(a > 0.0 && a < 1.0)) throw GeometryError("critical catenoid root-find left (0, 1)");
    if (std::abs(step) < 1e-16) break;
  }
  if (!(std::abs(F(a)) < 1e-12)) throw GeometryError("critical catenoid root-find did not converge");
  out.a = a;
  out.t = catenoid_exit_parameter(a);
  return out;
}

ScenarioResult annulus_scenario(const AnnulusOptions& opt) {
  ScenarioResult res;
  res.scenario = "annulus";
  const Domain ball = Domain::unit_ball();
  surfaces::SurfacePatch patch;
  std::vector<Vec3> boundary;
  const int per_circle = 64;
  if (opt.input == AnnulusInput::sphere_cap) {
    const NitscheCap cap = nitsche_cap(1.5, M_PI / 3.0);
    patch = cap.patch;
    for (int k = 0; k < per_circle; ++k) boundary.push_back(cap.boundary_point(2.0 * M_PI * k / per_circle));
    res.labels = {{"surface", "sphere_cap"}};
  } else {
    const CatenoidNeck neck = critical_catenoid_neck();
    const double a = opt.input == AnnulusInput::critical_catenoid ? neck.a : opt.squeeze * neck.a;
    const double t = catenoid_exit_parameter(a);
    patch = surfaces::catenoid_patch(Vec3::Zero(), Vec3::UnitZ(), a, -t, t);
    for (double s : {-t, t})
      for (int k = 0; k < per_circle; ++k) boundary.push_back(patch.param.point(s, 2.0 * M_PI * k / per_circle));
    res.params = {{"neck", a}, {"t", t}, {"newton_iterations", neck.iterations}};
    res.labels = {{"surface", opt.input == AnnulusInput::critical_catenoid ? "critical_catenoid" : "squeezed_catenoid"}};
  }

  // Compare against the family of the surface's own mean curvature.
  const auto& rect = patch.rect;
  const auto forms = geometry::fundamental_forms(ball.chart(), patch.param, 0.5 * (rect.u0 + rect.u1),
                                                 0.5 * (rect.v0 + rect.v1));
  double H = geometry::mean_and_principal_curvatures(forms).mean;
  if (std::abs(H) < 1e-10) H = 0.0;
  const FamilyKind family = FamilyKind::cmc_spheres(H);
  res.labels.emplace_back("family", family.describe());
  res.grid = sigma::sample_sigma_grid(ball.chart(), patch.param, family, rect, opt.grid, opt.grid);
  const double scale = std::max(1.0, std::abs(H));
  if (res.grid->max_norm < 1e-8 * scale) {
    res.verdict = Verdict::degenerate;
    res.conclusion = "sigma vanishes identically: the input is a member of the comparison family";
    res.checks.push_back(check_below("max_sigma", res.grid->max_norm, 1e-8 * scale));
    return res;
  }

  double lo = kInf, hi = -kInf, err = 0.0;
  for (const Vec3& x : boundary) {
    const double al = contact_angle(ball, patch.implicit, x).alpha;
    lo = std::min(lo, al);
    hi = std::max(hi, al);
    err = std::max(err, std::abs(al - 0.5 * M_PI));
  }
  res.checks.push_back(check_below("free_boundary_angle_error", err, opt.tol_angle));
  res.checks.push_back(check_below("angle_spread", hi - lo, opt.tol_angle));

  const auto sing = sigma::sigma_singularities(*res.grid);
  res.checks.push_back(check_below("umbilics", static_cast<double>(sing.points.size()) + (sing.non_isolated ? 1 : 0),
                                   0.0));
  res.checks.push_back(check_above("min_sigma_ratio", res.grid->min_norm / res.grid->max_norm, 1e-3));
  res.checks.push_back(check_below("lorentz_violations", res.grid->lorentz_violations, 0.0));

  std::vector<index::IndexedSingularity> indexed;
  for (const auto& s : sing.points) indexed.push_back({s.u, s.v, 0.0, {s.twice_index}, "umbilic"});
  const index::DoubleSurfaceAtlas torus{index::DoubleSurfaceAtlas::Base::annulus};
  const auto ph = index::poincare_hopf_audit(indexed, torus.euler_characteristic());
  res.params.emplace_back("index_sum", ph.sum());
  res.params.emplace_back("euler_characteristic", ph.euler_characteristic);
  res.checks.push_back(check_below("poincare_hopf_gap", std::abs(ph.sum() - ph.euler_characteristic), 0.0,
                                   index::verdict(ph)));
  res.settle("umbilic-free free boundary annulus", "not a free boundary annulus without umbilics");
  return res;
}

ScenarioResult free_boundary_catenoid_scenario(const FreeBoundaryOptions& opt) {
  ScenarioResult res;
  res.scenario = "free_boundary_catenoid";
  res.params = {{"neck", opt.neck}, {"twist", opt.twist}, {"swap_branches", opt.swap_branches ? 1.0 : 0.0}};
  const Domain half = Domain::half_space();
  const FamilyKind planes = FamilyKind::planes();
  const double a = opt.neck;

  surfaces::SurfacePatch patch;
  std::vector<Vec3> boundary;
  const auto xs = linspace(-opt.extent, opt.extent, opt.twist == 0.0 ? opt.boundary_samples / 2 : opt.boundary_samples);
  if (opt.twist == 0.0) {
    // Axis x1, so that the half phi in [0, pi] lies over x3 >= 0.
    patch = surfaces::catenoid_patch(Vec3::Zero(), Vec3::UnitX(), a, -opt.extent / a, opt.extent / a, 0.0, M_PI);
    for (double x : xs)
      for (double side : {1.0, -1.0}) boundary.emplace_back(x, side * a * std::cosh(x / a), 0.0);
    res.labels = {{"surface", "half_catenoid"}};
  } else {
    surfaces::Frame fr;
    fr.e1 = Vec3::UnitX();
    fr.e2 = Vec3::UnitZ();
    fr.n = -Vec3::UnitY();
    patch = surfaces::graph_patch(fr, surfaces::product_height(-opt.twist), opt.extent);
    patch.rect = {-opt.extent, opt.extent, 0.0, opt.extent};
    for (double x : xs) boundary.emplace_back(x, 0.0, 0.0);
    res.labels = {{"surface", "twisted_graph"}};
  }

  double mixed = 0.0, misalign = 0.0;
  int checked = 0;
  for (const Vec3& p : boundary) {
    const auto rep = sigma::boundary_angle_audit(half, patch.implicit, planes, p);
    if (rep.status != sigma::BoundaryAngleReport::Status::checked) continue;
    ++checked;
    mixed = std::max(mixed, rep.mixed);
    misalign = std::max(misalign, rep.misalignment);
  }
  res.checks.push_back(check_above("boundary_points_checked", checked, static_cast<double>(boundary.size())));
  res.checks.push_back(check_below("max_mixed_derivative", mixed, opt.tol_mixed));
  res.checks.push_back(check_below("principal_misalignment", misalign, opt.tol_angle));

  // Collar of the seam: the patch's first coordinate runs along the boundary
  // and the second points into the surface.
  const ConformalChart chart = half.chart();
  const auto& param = patch.param;
  auto directions = [&](double s, double tau) {
    const Mat2 sg = sigma::sigma_at(chart, param, planes, s, tau);
    return sigma::asymptotic_directions(sg, geometry::fundamental_forms(chart, param, s, tau).first);
  };
  index::CollarField collar;
  collar.L1 = [&](double s, double tau) { return directions(s, tau).first; };
  collar.L2 = opt.swap_branches ? collar.L1 : index::DirectionField([&](double s, double tau) {
    return directions(s, tau).second;
  });
  const auto seam_s = linspace(patch.rect.u0 * 0.9, patch.rect.u1 * 0.9, 16);
  const auto seam = index::seam_check(collar, seam_s, opt.tol_seam);
  res.checks.push_back(check_below("seam_c0_gap", seam.c0_gap, opt.tol_seam));
  res.checks.push_back(check_below("seam_derivative_gap", seam.derivative_gap, opt.tol_seam));
  res.settle("boundary alignment and seam regularity hold", "capillary alignment violated");
  return res;
}

ScenarioResult weingarten_family_check(const families::Ovaloid& profile, const WeingartenOptions& opt) {
  ScenarioResult res;
  res.scenario = "weingarten";
  res.labels = {{"profile", profile.name()}, {"relation", opt.relation}};
  const auto v = profile.validate();
  res.checks.push_back(check_above("gauss_angle_min_step", v.min_gauss_step, 0.0, v.gauss_monotone ? "" : v.reason));
  res.checks.push_back(check_above("min_principal_curvature", v.min_curvature, 0.0));
  res.checks.back().pass = res.checks.back().pass && v.min_curvature > 0.0;
  res.checks.front().pass = v.gauss_monotone;
  if (!v.ok()) {
    res.settle("", "profile rejected: " + v.reason);
    return res;
  }
  res.checks.push_back(
      check_below("gauss_coverage", std::abs(profile.gauss_angle(0.0)) + std::abs(profile.gauss_angle(M_PI) - M_PI),
                  1e-9));

  double sym = 0.0;
  for (int i = 1; i < 16; ++i) {
    const double th = M_PI * i / 16;
    const Vec3 ref = profile.point(th, 0.0);
    for (int j = 1; j < 8; ++j) {
      const Vec3 q = profile.point(th, 2.0 * M_PI * j / 8);
      sym = std::max({sym, std::abs(q.head<2>().norm() - ref.head<2>().norm()), std::abs(q.z() - ref.z())});
    }
  }
  res.checks.push_back(check_below("rotational_symmetry", sym, 1e-12));

  families::WeingartenRelation phi;
  if (opt.relation == "induced_mean") {
    phi = families::WeingartenRelation::induced(profile, families::WeingartenRelation::Type::mean);
  } else if (opt.relation == "induced_gauss") {
    phi = families::WeingartenRelation::induced(profile, families::WeingartenRelation::Type::gauss);
  } else if (opt.relation == "constant_mean") {
    phi = families::WeingartenRelation::constant_mean(opt.constant);
  } else {
    throw std::invalid_argument("unknown Weingarten relation '" + opt.relation + "'");
  }
  double worst = 0.0;
  std::vector<Vec3> samples;
  for (int i = 0; i < opt.samples; ++i) {
    const double th = M_PI * (i + 0.5) / opt.samples;
    const Vec3 s(profile.meridian_curvature(th), profile.parallel_curvature(th), profile.gauss_angle(th));
    samples.push_back(s);
    worst = std::max(worst, std::abs(phi(s.x(), s.y(), s.z())));
  }
  res.checks.push_back(check_below("relation_residual", worst, opt.tol_relation));
  const auto ell = families::pde_ellipticity_audit(phi, samples);
  res.checks.push_back(check_above("ellipticity_min_product", ell.min_product, 0.0));
  res.checks.back().pass = ell.pass();

  const FamilyKind kind = FamilyKind::translated_ovaloid(profile);
  const Domain half = Domain::half_space();
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::normal_distribution<double> g;
  double spread = 0.0;
  int met = 0;
  for (int k = 0; k < opt.members; ++k) {
    Vec3 nu(g(rng), g(rng), g(rng));
    nu.z() = std::abs(nu.z());
    nu.normalize();
    if (nu.z() < 0.2) {
      --k;
      continue;
    }
    const Vec3 p(box(rng), box(rng), 0.1);
    const auto m = families::member(kind, p, nu);
    const auto audit = families::constant_angle_audit(m, half, 64);
    if (audit.intersects && audit.transversal) ++met;
    spread = std::max(spread, audit.spread());
  }
  res.checks.push_back(check_above("transversal_members", met, opt.members));
  res.checks.push_back(check_below("member_angle_spread", spread, opt.tol_spread));
  res.settle("rotational Weingarten ovaloid family", "Weingarten family check failed");
  return res;
}

S3ScanReport s3_nonexistence_scan(double r, int n, unsigned long long seed, int angle_checks) {
  if (!(r > 0.0 && r < 0.5 * M_PI)) throw std::invalid_argument("cap radius must lie in (0, pi/2)");
  S3ScanReport rep;
  rep.r = r;
  const Domain caps = Domain::s3_two_caps(r);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int i = 0; i < n; ++i) {
    Vec4 a(g(rng), g(rng), g(rng), g(rng));
    a.normalize();
    const auto topo = families::intersection_topology(a, r);
    ++rep.samples;
    rep.poles.push_back(a);
    rep.topologies.push_back(topo.topology);
    if (topo.topology == families::Topology::degenerate) {
      ++rep.degenerate;
      continue;
    }
    const int circles = (topo.distance_north < r ? 1 : 0) + (topo.distance_south < r ? 1 : 0);
    if (circles == 1) ++rep.disks;
    if (topo.topology == families::Topology::annulus) {
      ++rep.annuli;
      if (rep.angle_checks < angle_checks && std::abs(topo.distance_north - r) > 1e-3) {
        const auto audit = families::constant_angle_audit(surfaces::implicit_equator(a), caps, 64);
        if (audit.intersects) {
          ++rep.angle_checks;
          rep.max_angle_spread = std::max(rep.max_angle_spread, audit.spread());
        }
      }
    } else {
      ++rep.spheres;
    }
  }
  return rep;
}

ScenarioResult s3_scan_scenario(double r, int n, unsigned long long seed, double tol_spread) {
  ScenarioResult res;
  res.scenario = "s3_scan";
  const S3ScanReport rep = s3_nonexistence_scan(r, n, seed);
  res.params = {{"r", r},
                {"samples", rep.samples},
                {"seed", static_cast<double>(seed)},
                {"spheres", rep.spheres},
                {"annuli", rep.annuli},
                {"degenerate", rep.degenerate},
                {"annulus_fraction", rep.annulus_fraction()}};
  res.checks.push_back(check_below("disks", rep.disks, 0.0));
  res.checks.push_back(check_above("angle_checks", rep.angle_checks, std::min(10, rep.annuli)));
  res.checks.push_back(check_below("max_angle_spread", rep.max_angle_spread, tol_spread));
  res.settle("no minimal capillary disks", "disk found");
  return res;
}

}  // namespace caplab::capillary
