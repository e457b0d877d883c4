#include "caplab/domains.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace caplab::domains {

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::unit_ball: return "unit_ball";
    case DomainKind::half_space: return "half_space";
    case DomainKind::s3_two_caps: return "s3_two_caps";
  }
  return "?";
}

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::interior: return "interior";
    case PointClass::boundary: return "boundary";
    case PointClass::exterior: return "exterior";
  }
  return "?";
}

Vec3 BoundaryComponent::inward_unit(const Vec3& x) const {
  if (shape == Shape::plane) return plane_normal;
  return radial_sign * (x - center).normalized();
}

double BoundaryComponent::signed_distance(const Vec3& x) const {
  if (shape == Shape::plane) return plane_normal.dot(x - center);
  return radial_sign * ((x - center).norm() - radius);
}

Domain Domain::unit_ball() {
  Domain d;
  d.kind_ = DomainKind::unit_ball;
  d.chart_ = ConformalChart::euclidean();
  d.boundary_ = {BoundaryComponent{BoundaryComponent::Shape::sphere, Vec3::Zero(), 1.0, Vec3::UnitZ(), -1}};
  return d;
}

Domain Domain::half_space() {
  Domain d;
  d.kind_ = DomainKind::half_space;
  d.chart_ = ConformalChart::euclidean();
  d.boundary_ = {BoundaryComponent{BoundaryComponent::Shape::plane, Vec3::Zero(), 0.0, Vec3::UnitZ(), +1}};
  return d;
}

Domain Domain::s3_two_caps(double r) {
  if (!(r > 0.0 && r < M_PI / 2.0)) throw GeometryError("s3_two_caps requires 0 < r < pi/2");
  Domain d;
  d.kind_ = DomainKind::s3_two_caps;
  d.chart_ = ConformalChart::sphere3();
  d.r_ = r;
  d.boundary_ = {
      BoundaryComponent{BoundaryComponent::Shape::sphere, Vec3::Zero(), std::tan(r / 2.0), Vec3::UnitZ(), +1},
      BoundaryComponent{BoundaryComponent::Shape::sphere, Vec3::Zero(), 1.0 / std::tan(r / 2.0), Vec3::UnitZ(), -1}};
  return d;
}

double Domain::defining_function(const Vec3& x) const {
  switch (kind_) {
    case DomainKind::unit_ball: return 1.0 - x.norm();
    case DomainKind::half_space: return x.z();
    case DomainKind::s3_two_caps: {
      // Geodesic distance to the north pole (x = 0) is 2 atan |x|.
      const double dn = 2.0 * std::atan(x.norm());
      return std::min(dn - r_, M_PI - dn - r_);
    }
  }
  return 0.0;
}

const BoundaryComponent& Domain::component_at(const Vec3& x) const {
  const BoundaryComponent* best = &boundary_.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& c : boundary_) {
    const double d = std::abs(c.signed_distance(x));
    if (d < best_d) {
      best_d = d;
      best = &c;
    }
  }
  return *best;
}

Vec3 Domain::inward_normal(const Vec3& x) const { return component_at(x).inward_unit(x) / chart_.lambda(x); }

Vec3 Domain::outward_unit(const Vec3& x) const { return -component_at(x).inward_unit(x); }

PointClass classify_point(const Domain& domain, const Vec3& x, double tol) {
  const double f = domain.defining_function(x);
  if (std::abs(f) <= tol) return PointClass::boundary;
  return f > 0.0 ? PointClass::interior : PointClass::exterior;
}

IsothermalBoundary boundary_isothermal(const Domain& domain, const Vec3& p, const Vec3& t_dir) {
  const BoundaryComponent& comp = domain.component_at(p);
  if (std::abs(domain.defining_function(p)) > 1e-8) throw GeometryError("point is not on the domain boundary");
  const Vec3 n_in = comp.inward_unit(p);
  Vec3 e1 = t_dir - t_dir.dot(n_in) * n_in;
  if (e1.norm() < 1e-12) throw GeometryError("tangent direction is normal to the boundary");
  e1.normalize();
  const Vec3 e2 = n_in.cross(e1);
  const ConformalChart chart = domain.chart();

  IsothermalBoundary b;
  b.e1 = e1;
  b.e2 = e2;
  if (comp.shape == BoundaryComponent::Shape::plane) {
    b.map = [=](double v, double z) -> Vec3 { return p + v * e1 + z * e2; };
    b.lambda_b = [=](double v, double z) { return chart.lambda(p + v * e1 + z * e2); };
    return b;
  }
  const Vec3 c = comp.center;
  const double r = comp.radius;
  const Vec3 q = 2.0 * c - p;  // antipode of p on the boundary sphere
  const Vec3 rad = p - c;
  b.map = [=](double v, double z) -> Vec3 {
    const double s2 = v * v + z * z;
    return q + 4.0 * r * r * (2.0 * rad + v * e1 + z * e2) / (4.0 * r * r + s2);
  };
  b.lambda_b = [=, map = b.map](double v, double z) {
    const double s2 = v * v + z * z;
    return chart.lambda(map(v, z)) * 4.0 * r * r / (4.0 * r * r + s2);
  };
  return b;
}

IsothermalBoundary boundary_isothermal(const Domain& domain, const Vec3& p) {
  const Vec3 n = domain.component_at(p).inward_unit(p);
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return boundary_isothermal(domain, p, seed - seed.dot(n) * n);
}

Mat3 AdaptedChart::jacobian(double u, double v, double z) const {
  const double h = fd_step;
  const auto d = [&](const Vec3& e) -> Vec3 {
    const Vec3 x(u, v, z);
    const auto f = [&](double s) { const Vec3 y = x + s * e; return map(y(0), y(1), y(2)); };
    return (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
  };
  Mat3 j;
  for (int k = 0; k < 3; ++k) j.col(k) = d(Vec3::Unit(k));
  return j;
}

Mat3 AdaptedChart::metric_coefficients(double u, double v, double z) const {
  const Mat3 j = jacobian(u, v, z);
  const double l = ambient.lambda(map(u, v, z));
  return l * l * j.transpose() * j;
}

AdaptedChart interior_adapted_chart(const ConformalChart& ambient, const Vec3& q, const Vec3& e1, const Vec3& n) {
  const Vec3 nn = n.normalized();
  const Vec3 a = (e1 - e1.dot(nn) * nn).normalized();
  const Vec3 b = nn.cross(a);
  AdaptedChart c;
  c.ambient = ambient;
  c.base = q;
  c.map = [=](double u, double v, double z) -> Vec3 { return q + u * a + v * b + z * nn; };
  return c;
}

BoundaryAdaptedChart boundary_adapted_chart(const Domain& domain, const Vec3& p, const Vec3& t_dir, double u_range,
                                            double rk4_step) {
  BoundaryAdaptedChart bc;
  bc.boundary = boundary_isothermal(domain, p, t_dir);
  bc.u_range = u_range;
  bc.chart.ambient = domain.chart();
  bc.chart.base = p;
  const BoundaryComponent comp = domain.component_at(p);
  const auto y = bc.boundary.map;
  const ConformalChart chart = domain.chart();
  if (chart.kind() == geometry::ChartKind::euclidean) {
    bc.chart.map = [=](double u, double v, double z) -> Vec3 {
      const Vec3 base = y(v, z);
      return base + u * comp.inward_unit(base);
    };
  } else {
    // Smooth in u: the step count is fixed by the chart range, not by u.
    const int steps = std::max(1, static_cast<int>(std::ceil(u_range / rk4_step)));
    bc.geodesic_steps = steps;
    bc.chart.map = [=](double u, double v, double z) -> Vec3 {
      const Vec3 base = y(v, z);
      const Vec3 vel = comp.inward_unit(base) / chart.lambda(base);
      if (u == 0.0) return base;
      return geometry::integrate_geodesic(chart, base, vel, u, steps).x;
    };
  }
  return bc;
}

GraphJet::GraphJet(ImplicitSurface surface, AdaptedChart chart, double radius, double step)
    : surface_(std::move(surface)), chart_(std::move(chart)), radius_(radius), step_(step) {}

double GraphJet::operator()(double u, double v) const {
  auto phi = [&](double z) { return surface_.value(chart_.map(u, v, z)); };
  const double eta = 1e-6;
  double z = 0.0;
  double f = phi(z);
  for (int it = 0; it < 60; ++it) {
    if (f == 0.0) return z;
    const double df = (phi(z + eta) - phi(z - eta)) / (2.0 * eta);
    if (!(std::abs(df) > 0.0)) break;
    const double dz = -f / df;
    z += dz;
    f = phi(z);
    if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) return z;
  }
  const Vec3 x = chart_.map(u, v, z);
  if (surface_.distance_estimate(x) < 1e-12) return z;
  throw GeometryError("graph value did not converge");
}

GraphDerivatives GraphJet::refined_derivatives(double u, double v) const {
  GraphDerivatives coarse = derivatives(u, v);
  const GraphJet half(surface_, chart_, radius_, 0.5 * step_);
  const GraphDerivatives fine = half.derivatives(u, v);
  auto mix = [](double c, double f) { return (16.0 * f - c) / 15.0; };
  coarse.hu = mix(coarse.hu, fine.hu);
  coarse.hv = mix(coarse.hv, fine.hv);
  coarse.huu = mix(coarse.huu, fine.huu);
  coarse.huv = mix(coarse.huv, fine.huv);
  coarse.hvv = mix(coarse.hvv, fine.hvv);
  return coarse;
}

Vec2 GraphJet::gradient(double u, double v) const {
  auto axes = [&](double d) {
    Vec2 r = Vec2::Zero();
    for (int k : {-2, -1, 1, 2}) {
      const double w = k == 1 ? 8.0 : k == -1 ? -8.0 : k == 2 ? -1.0 : 1.0;
      r(0) += w * (*this)(u + k * d, v);
      r(1) += w * (*this)(u, v + k * d);
    }
    return Vec2(r / (12.0 * d));
  };
  // Halve the step and keep the extrapolant where consecutive ones agree best.
  double d = step_;
  Vec2 coarse = axes(d);
  Vec2 prev = Vec2::Zero(), best = Vec2::Zero();
  double best_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 6; ++k, d *= 0.5) {
    const Vec2 fine = axes(0.5 * d);
    const Vec2 r = (16.0 * fine - coarse) / 15.0;
    if (k > 0 && (r - prev).norm() < best_gap) {
      best_gap = (r - prev).norm();
      best = r;
    }
    prev = r;
    coarse = fine;
  }
  return best;
}

Vec3 GraphJet::embed(double u, double v) const { return chart_.map(u, v, (*this)(u, v)); }

GraphDerivatives GraphJet::derivatives(double u, double v) const {
  const double d = step_;
  std::array<std::array<double, 5>, 5> g{};
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) g[i + 2][j + 2] = (*this)(u + i * d, v + j * d);

  static constexpr std::array<double, 5> w1 = {1.0, -8.0, 0.0, 8.0, -1.0};     // / 12 d
  static constexpr std::array<double, 5> w2 = {-1.0, 16.0, -30.0, 16.0, -1.0};  // / 12 d^2
  GraphDerivatives r;
  r.h = g[2][2];
  for (int k = 0; k < 5; ++k) {
    r.hu += w1[k] * g[k][2];
    r.hv += w1[k] * g[2][k];
    r.huu += w2[k] * g[k][2];
    r.hvv += w2[k] * g[2][k];
    for (int l = 0; l < 5; ++l) r.huv += w1[k] * w1[l] * g[k][l];
  }
  r.hu /= 12.0 * d;
  r.hv /= 12.0 * d;
  r.huu /= 12.0 * d * d;
  r.hvv /= 12.0 * d * d;
  r.huv /= 144.0 * d * d;

  const double t = 10.0 * d;
  std::array<std::array<double, 5>, 5> q{};
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      if (i == 0 || j == 0 || (std::abs(i) == 1 && std::abs(j) == 1)) q[i + 2][j + 2] = (*this)(u + i * t, v + j * t);
  static constexpr std::array<double, 5> w3 = {-1.0, 2.0, 0.0, -2.0, 1.0};  // / 2 t^3
  for (int k = 0; k < 5; ++k) {
    r.huuu += w3[k] * q[k][2];
    r.hvvv += w3[k] * q[2][k];
  }
  r.huuu /= 2.0 * t * t * t;
  r.hvvv /= 2.0 * t * t * t;
  // D_uu D_v and D_u D_vv with three-point stencils.
  static constexpr std::array<double, 3> s2 = {1.0, -2.0, 1.0};
  static constexpr std::array<double, 3> s1 = {-1.0, 0.0, 1.0};
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) {
      r.huuv += s2[k] * s1[l] * q[k + 1][l + 1];
      r.huvv += s1[k] * s2[l] * q[k + 1][l + 1];
    }
  }
  r.huuv /= 2.0 * t * t * t;
  r.huvv /= 2.0 * t * t * t;
  return r;
}

GraphJet graph_in_chart(const ImplicitSurface& surface, const AdaptedChart& chart, double radius, double step) {
  const Vec3 x0 = chart.map(0.0, 0.0, 0.0);
  if (surface.distance_estimate(x0) > 1e-8) throw GeometryError("surface does not pass through the chart base point");
  const Vec3 dz = chart.jacobian(0.0, 0.0, 0.0).col(2);
  const double c = std::abs(surface.unit_normal(x0).dot(dz.normalized()));
  if (c < 1e-6) throw GeometryError("not a graph here");
  return GraphJet(surface, chart, radius, step);
}

}  // namespace caplab::domains
