#pragma once

#include <complex>
#include <functional>
#include <string>

#include "caplab/geometry.hpp"

namespace caplab::surfaces {

using geometry::ImplicitSurface;
using geometry::ParametricSurface;

struct ParamRect {
  double u0 = -1.0, u1 = 1.0, v0 = -1.0, v1 = 1.0;
  double diameter() const { return std::hypot(u1 - u0, v1 - v0); }
};

/// Orthonormal frame (e1, e2, n) with e1 x e2 = n.
struct Frame {
  Vec3 origin = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 n = Vec3::UnitZ();

  /// Right-handed frame whose third axis is `normal`.
  static Frame around(const Vec3& origin, const Vec3& normal);
};

/// A surface known both as an immersion and as a level set. The
/// parametric normal and grad(implicit) point the same way.
struct SurfacePatch {
  std::string name;
  ParametricSurface param;
  ImplicitSurface implicit;
  ParamRect rect;
};

/// Height function with derivatives up to order two.
struct HeightFunction {
  std::function<double(double, double)> value;
  std::function<Vec2(double, double)> gradient;
  std::function<Mat2(double, double)> hessian;
};

HeightFunction saddle_height();                                   // (u^2 - v^2) / 2
HeightFunction harmonic_height(int n, std::complex<double> alpha);  // Re(alpha z^n)
HeightFunction product_height(double c);                          // c u v

ImplicitSurface implicit_plane(const Vec3& point, const Vec3& normal);
/// sign = +1: outward normal; sign = -1: inward normal.
ImplicitSurface implicit_sphere(const Vec3& center, double radius, int sign);
ImplicitSurface implicit_catenoid(const Vec3& origin, const Vec3& axis, double neck);
ImplicitSurface implicit_graph(const Frame& frame, HeightFunction f);
/// Great sphere {<P(x), a> = 0} of S^3 in the stereographic chart, written
/// as the quadric a_123 . x + a_4 (1 - |x|^2) / 2, which has the sign of
/// <P(x), a>.
ImplicitSurface implicit_equator(const Vec4& pole);

SurfacePatch plane_patch(const Vec3& point, const Vec3& normal, double half_width);
/// Polar parametrization about `axis` (theta measured from axis);
/// orientation +1 means outward normal.
SurfacePatch sphere_patch(const Vec3& center, double radius, const Vec3& axis, double theta0, double theta1,
                          int orientation);
/// Sphere with radial perturbation R (1 + eps b(theta, phi)), finite-difference jets.
SurfacePatch bumped_sphere_patch(const Vec3& center, double radius, const Vec3& axis, double theta0,
                                 double theta1, int orientation, double eps);
/// X(s, phi) = origin + a s axis + a cosh(s) (cos phi f1 + sin phi f2).
SurfacePatch catenoid_patch(const Vec3& origin, const Vec3& axis, double neck, double s0, double s1,
                            double phi0 = 0.0, double phi1 = 2.0 * M_PI);
SurfacePatch graph_patch(const Frame& frame, HeightFunction f, double half_width);
SurfacePatch equator_patch(const Vec4& pole, double theta_max = 2.5);

}  // namespace caplab::surfaces
