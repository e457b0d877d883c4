#include "caplab/surfaces.hpp"

#include <cmath>

namespace caplab::surfaces {

using geometry::SurfaceJet;

Frame Frame::around(const Vec3& origin, const Vec3& normal) {
  Frame f;
  f.origin = origin;
  f.n = normal.normalized();
  const Vec3 seed = std::abs(f.n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  f.e1 = (seed - seed.dot(f.n) * f.n).normalized();
  f.e2 = f.n.cross(f.e1);
  return f;
}

namespace {

/// Flip the implicit function if its gradient disagrees with the parametric
/// normal at the rectangle center.
void align_orientation(SurfacePatch& patch) {
  const double uc = 0.5 * (patch.rect.u0 + patch.rect.u1);
  const double vc = 0.5 * (patch.rect.v0 + patch.rect.v1);
  const SurfaceJet j = patch.param.jet(uc, vc);
  const Vec3 pn = patch.param.orientation() * j.xu.cross(j.xv);
  if (pn.dot(patch.implicit.gradient(j.x)) < 0.0) {
    ImplicitSurface flipped;
    auto inner = patch.implicit;
    flipped.value = [inner](const Vec3& x) { return -inner.value(x); };
    flipped.gradient = [inner](const Vec3& x) -> Vec3 { return -inner.gradient(x); };
    flipped.hessian = [inner](const Vec3& x) -> Mat3 { return -inner.hessian(x); };
    patch.implicit = flipped;
  }
}

Frame axis_frame(const Vec3& axis) { return Frame::around(Vec3::Zero(), axis); }

}  // namespace

HeightFunction saddle_height() {
  return {[](double u, double v) { return 0.5 * (u * u - v * v); },
          [](double u, double v) { return Vec2(u, -v); },
          [](double, double) {
            Mat2 h;
            h << 1, 0, 0, -1;
            return h;
          }};
}

HeightFunction harmonic_height(int n, std::complex<double> alpha) {
  using C = std::complex<double>;
  const double nn = n;
  return {[=](double u, double v) { return std::real(alpha * std::pow(C(u, v), n)); },
          [=](double u, double v) {
            const C d = alpha * nn * std::pow(C(u, v), n - 1);
            return Vec2(d.real(), -d.imag());
          },
          [=](double u, double v) {
            const C d2 = n >= 2 ? alpha * nn * (nn - 1.0) * std::pow(C(u, v), n - 2) : C(0.0);
            Mat2 h;
            h << d2.real(), -d2.imag(), -d2.imag(), -d2.real();
            return h;
          }};
}

HeightFunction product_height(double c) {
  return {[c](double u, double v) { return c * u * v; }, [c](double u, double v) { return Vec2(c * v, c * u); },
          [c](double, double) {
            Mat2 h;
            h << 0, c, c, 0;
            return h;
          }};
}

ImplicitSurface implicit_plane(const Vec3& point, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  return {[=](const Vec3& x) { return n.dot(x - point); }, [=](const Vec3&) { return n; },
          [](const Vec3&) -> Mat3 { return Mat3::Zero(); }};
}

ImplicitSurface implicit_sphere(const Vec3& center, double radius, int sign) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  return {[=](const Vec3& x) { return s * ((x - center).squaredNorm() - radius * radius) / (2.0 * radius); },
          [=](const Vec3& x) -> Vec3 { return s * (x - center) / radius; },
          [=](const Vec3&) -> Mat3 { return s * Mat3::Identity() / radius; }};
}

ImplicitSurface implicit_catenoid(const Vec3& origin, const Vec3& axis, double a) {
  const Vec3 k = axis.normalized();
  return {[=](const Vec3& x) {
            const Vec3 y = x - origin;
            const double t = y.dot(k);
            return (y - t * k).norm() - a * std::cosh(t / a);
          },
          [=](const Vec3& x) -> Vec3 {
            const Vec3 y = x - origin;
            const double t = y.dot(k);
            const Vec3 w = y - t * k;
            return w / w.norm() - std::sinh(t / a) * k;
          },
          [=](const Vec3& x) -> Mat3 {
            const Vec3 y = x - origin;
            const double t = y.dot(k);
            const Vec3 w = y - t * k;
            const double r = w.norm();
            const Vec3 wh = w / r;
            const Mat3 p = Mat3::Identity() - k * k.transpose();
            return (p - wh * wh.transpose()) / r - std::cosh(t / a) / a * k * k.transpose();
          }};
}

ImplicitSurface implicit_graph(const Frame& fr, HeightFunction f) {
  return {[=](const Vec3& x) {
            const Vec3 y = x - fr.origin;
            return y.dot(fr.n) - f.value(y.dot(fr.e1), y.dot(fr.e2));
          },
          [=](const Vec3& x) -> Vec3 {
            const Vec3 y = x - fr.origin;
            const Vec2 g = f.gradient(y.dot(fr.e1), y.dot(fr.e2));
            return fr.n - g(0) * fr.e1 - g(1) * fr.e2;
          },
          [=](const Vec3& x) -> Mat3 {
            const Vec3 y = x - fr.origin;
            const Mat2 h = f.hessian(y.dot(fr.e1), y.dot(fr.e2));
            Eigen::Matrix<double, 3, 2> b;
            b.col(0) = fr.e1;
            b.col(1) = fr.e2;
            return -b * h * b.transpose();
          }};
}

ImplicitSurface implicit_equator(const Vec4& pole) {
  const Vec4 a = pole.normalized();
  const Vec3 ah = a.head<3>();
  const double a4 = a(3);
  return {[=](const Vec3& x) { return ah.dot(x) + 0.5 * a4 * (1.0 - x.squaredNorm()); },
          [=](const Vec3& x) -> Vec3 { return ah - a4 * x; },
          [=](const Vec3&) -> Mat3 { return -a4 * Mat3::Identity(); }};
}

SurfacePatch plane_patch(const Vec3& point, const Vec3& normal, double w) {
  const Frame fr = Frame::around(point, normal);
  SurfacePatch p;
  p.name = "plane";
  p.param = ParametricSurface::analytic([fr](double u, double v) {
    return SurfaceJet{fr.origin + u * fr.e1 + v * fr.e2, fr.e1, fr.e2, Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  });
  p.implicit = implicit_plane(point, normal);
  p.rect = {-w, w, -w, w};
  align_orientation(p);
  return p;
}

SurfacePatch sphere_patch(const Vec3& center, double radius, const Vec3& axis, double theta0, double theta1,
                          int orientation) {
  const Frame fr = axis_frame(axis);
  const double r = radius;
  SurfacePatch p;
  p.name = "sphere";
  p.param = ParametricSurface::analytic(
      [=](double th, double ph) {
        const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
        const Vec3 w = st * cp * fr.e1 + st * sp * fr.e2 + ct * fr.n;
        SurfaceJet j;
        j.x = center + r * w;
        j.xu = r * (ct * cp * fr.e1 + ct * sp * fr.e2 - st * fr.n);
        j.xv = r * (-st * sp * fr.e1 + st * cp * fr.e2);
        j.xuu = -r * w;
        j.xuv = r * (-ct * sp * fr.e1 + ct * cp * fr.e2);
        j.xvv = r * (-st * cp * fr.e1 - st * sp * fr.e2);
        return j;
      },
      orientation);
  p.implicit = implicit_sphere(center, radius, orientation);
  p.rect = {theta0, theta1, 0.0, 2.0 * M_PI};
  align_orientation(p);
  return p;
}

SurfacePatch bumped_sphere_patch(const Vec3& center, double radius, const Vec3& axis, double theta0,
                                 double theta1, int orientation, double eps) {
  const Frame fr = axis_frame(axis);
  auto map = [=](double th, double ph) -> Vec3 {
    const double st = std::sin(th);
    const Vec3 w = st * std::cos(ph) * fr.e1 + st * std::sin(ph) * fr.e2 + std::cos(th) * fr.n;
    const double bump = st * st * st * std::cos(3.0 * ph);
    return center + radius * (1.0 + eps * bump) * w;
  };
  SurfacePatch p;
  p.name = "bumped_sphere";
  p.param = ParametricSurface::finite_difference(map, 1e-5 * radius, orientation);
  p.implicit = implicit_sphere(center, radius, orientation);  // unperturbed reference only
  p.rect = {theta0, theta1, 0.0, 2.0 * M_PI};
  return p;
}

SurfacePatch catenoid_patch(const Vec3& origin, const Vec3& axis, double a, double s0, double s1, double phi0,
                            double phi1) {
  const Frame fr = axis_frame(axis);
  SurfacePatch p;
  p.name = "catenoid";
  p.param = ParametricSurface::analytic([=](double s, double ph) {
    const Vec3 rho = std::cos(ph) * fr.e1 + std::sin(ph) * fr.e2;
    const Vec3 rho_p = -std::sin(ph) * fr.e1 + std::cos(ph) * fr.e2;
    const double ch = std::cosh(s), sh = std::sinh(s);
    SurfaceJet j;
    j.x = origin + a * s * fr.n + a * ch * rho;
    j.xu = a * fr.n + a * sh * rho;
    j.xv = a * ch * rho_p;
    j.xuu = a * ch * rho;
    j.xuv = a * sh * rho_p;
    j.xvv = -a * ch * rho;
    return j;
  });
  p.implicit = implicit_catenoid(origin, fr.n, a);
  p.rect = {s0, s1, phi0, phi1};
  align_orientation(p);
  return p;
}

SurfacePatch graph_patch(const Frame& fr, HeightFunction f, double w) {
  SurfacePatch p;
  p.name = "graph";
  p.param = ParametricSurface::analytic([fr, f](double u, double v) {
    const double h = f.value(u, v);
    const Vec2 g = f.gradient(u, v);
    const Mat2 hh = f.hessian(u, v);
    SurfaceJet j;
    j.x = fr.origin + u * fr.e1 + v * fr.e2 + h * fr.n;
    j.xu = fr.e1 + g(0) * fr.n;
    j.xv = fr.e2 + g(1) * fr.n;
    j.xuu = hh(0, 0) * fr.n;
    j.xuv = hh(0, 1) * fr.n;
    j.xvv = hh(1, 1) * fr.n;
    return j;
  });
  p.implicit = implicit_graph(fr, f);
  p.rect = {-w, w, -w, w};
  align_orientation(p);
  return p;
}

SurfacePatch equator_patch(const Vec4& pole, double theta_max) {
  const Vec4 a = pole.normalized();
  const Vec4 north(0, 0, 0, 1);
  // E3: point of the great sphere closest to the north pole.
  Vec4 e3 = north - north.dot(a) * a;
  if (e3.norm() < 1e-12) e3 = Vec4(1, 0, 0, 0) - a(0) * a;
  e3.normalize();
  Eigen::Matrix4d basis;
  basis.col(0) = a;
  basis.col(1) = e3;
  // Gram-Schmidt on fixed seeds.
  basis.col(2) = Vec4(0.3, -0.5, 0.7, 0.2);
  basis.col(3) = Vec4(-0.6, 0.1, 0.25, 0.9);
  for (int c = 2; c < 4; ++c) {
    for (int k = 0; k < c; ++k) basis.col(c) -= basis.col(c).dot(basis.col(k)) * basis.col(k);
    basis.col(c).normalize();
  }
  const Vec4 e1 = basis.col(2), e2 = basis.col(3);
  auto map = [=](double th, double ph) -> Vec3 {
    const Vec4 q = std::cos(th) * e3 + std::sin(th) * (std::cos(ph) * e1 + std::sin(ph) * e2);
    return geometry::s3_project(q);
  };
  SurfacePatch p;
  p.name = "equator";
  p.param = ParametricSurface::finite_difference(map, 1e-5);
  p.implicit = implicit_equator(a);
  p.rect = {0.05, theta_max, 0.0, 2.0 * M_PI};
  // Orientation follows the implicit gradient.
  const SurfaceJet j = p.param.jet(0.5 * (p.rect.u0 + p.rect.u1), 1.0);
  if (j.xu.cross(j.xv).dot(p.implicit.gradient(j.x)) < 0.0) p.param = p.param.flipped();
  return p;
}

}  // namespace caplab::surfaces
