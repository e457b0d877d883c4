#pragma once

#include <functional>
#include <string>
#include <vector>

#include "caplab/geometry.hpp"

namespace caplab::families {

/// Closed surface of revolution about the z-axis, given in polar form
/// rho(theta) with theta the polar angle from +z. Curvatures are taken with
/// respect to the inward normal (positive on convex profiles).
class Ovaloid {
 public:
  struct Profile {
    std::function<double(double)> rho, rho_p, rho_pp;
  };

  Ovaloid(std::string name, Profile profile);

  static Ovaloid round_sphere(double radius = 1.0);
  /// Ellipsoid with equatorial semi-axis a and polar semi-axis b.
  static Ovaloid prolate(double a, double b);
  /// Pinched profile rho = 1 - depth sin^2(theta).
  static Ovaloid dumbbell(double depth = 0.6);
  /// Uniform samples on [0, pi] including both poles, interpolated by a
  /// trigonometric series of the even 2 pi-periodic extension.
  static Ovaloid from_samples(const std::vector<double>& theta, const std::vector<double>& rho);
  /// CSV with header and columns theta,rho.
  static Ovaloid from_csv(const std::string& path);
  /// "round_sphere", "round_sphere(R)", "prolate(a,b)", "dumbbell", "dumbbell(d)" or "csv:<path>".
  static Ovaloid from_spec(const std::string& spec);

  const std::string& name() const { return name_; }

  double rho(double theta) const { return profile_.rho(theta); }
  /// Meridian point (r, z).
  Vec2 meridian(double theta) const;
  /// Polar angle of the outward normal, increasing from 0 to pi on ovaloids.
  double gauss_angle(double theta) const;
  double meridian_curvature(double theta) const;
  double parallel_curvature(double theta) const;

  Vec3 point(double theta, double phi) const;
  Vec3 outward_normal(double theta, double phi) const;

  /// Profile angle whose outward normal has the given polar angle.
  double invert_gauss(double gauss_angle) const;
  /// Model point with outward normal nu.
  Vec3 point_with_normal(const Vec3& nu) const;

  /// Level set |y| - rho(theta(y)) of the translated copy, outward oriented.
  geometry::ImplicitSurface implicit(const Vec3& translation) const;
  /// Analytic parametrization (theta, phi) of the translated copy, outward oriented.
  geometry::ParametricSurface parametrization(const Vec3& translation) const;

  struct Validation {
    bool gauss_monotone = false;
    bool convex = false;
    double min_curvature = 0.0;
    double min_gauss_step = 0.0;
    std::string reason;
    bool ok() const { return gauss_monotone && convex; }
  };
  Validation validate(int samples = 2001) const;

 private:
  std::string name_;
  Profile profile_;
};

}  // namespace caplab::families
