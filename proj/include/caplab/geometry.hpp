#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace caplab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Raised when a precondition of a geometric construction is violated
/// (non-immersion, vertical tangency, point off the boundary, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace geometry {

enum class ChartKind { euclidean, sphere3_stereographic };

std::string to_string(ChartKind kind);

/// Conformally flat chart on R^3 with metric g = lambda(x)^2 * delta.
///
/// `euclidean` has lambda == 1; `sphere3_stereographic` is the round unit
/// S^3 seen through stereographic projection from the south pole, with
/// lambda(x) = 2 / (1 + |x|^2). The chart misses the south pole only.
class ConformalChart {
 public:
  explicit ConformalChart(ChartKind kind = ChartKind::euclidean) : kind_(kind) {}

  static ConformalChart euclidean() { return ConformalChart(ChartKind::euclidean); }
  static ConformalChart sphere3() { return ConformalChart(ChartKind::sphere3_stereographic); }

  ChartKind kind() const { return kind_; }

  double lambda(const Vec3& x) const;
  Vec3 lambda_grad(const Vec3& x) const;
  /// Gradient of log(lambda).
  Vec3 log_lambda_grad(const Vec3& x) const;

  /// g_x(a, b)
  double inner(const Vec3& x, const Vec3& a, const Vec3& b) const;
  double norm(const Vec3& x, const Vec3& a) const;

  /// Gamma(a, b)^k = sum_ij Gamma^k_ij a^i b^j.
  Vec3 christoffel_contract(const Vec3& x, const Vec3& a, const Vec3& b) const;

 private:
  ChartKind kind_;
};

/// Gamma^k_ij stored as gamma[k](i, j).
using Christoffel = std::array<Mat3, 3>;

Mat3 metric_at(const ConformalChart& chart, const Vec3& x);
Christoffel christoffel(const ConformalChart& chart, const Vec3& x);

/// Sectional curvature of the coordinate plane spanned by a, b at x,
/// from finite differences of the exact Christoffel symbols.
double sectional_curvature(const ConformalChart& chart, const Vec3& x, const Vec3& a, const Vec3& b,
                           double step = 1e-5);

/// Position and first/second partials of an immersion X(u, v).
struct SurfaceJet {
  Vec3 x, xu, xv, xuu, xuv, xvv;
};

/// Immersion of a parameter rectangle into chart coordinates.
///
/// Jets are either analytic or central finite differences of the map with
/// step h_fd for first derivatives and 10 h_fd for second derivatives.
class ParametricSurface {
 public:
  using Map = std::function<Vec3(double, double)>;
  using JetFn = std::function<SurfaceJet(double, double)>;

  ParametricSurface() = default;

  static ParametricSurface analytic(JetFn jets, int orientation = +1);
  static ParametricSurface finite_difference(Map map, double h_fd, int orientation = +1);

  SurfaceJet jet(double u, double v) const;
  Vec3 point(double u, double v) const { return map_(u, v); }
  int orientation() const { return orientation_; }
  bool is_finite_difference() const { return !jets_; }
  double step() const { return h_fd_; }

  /// Same surface with the opposite normal branch.
  ParametricSurface flipped() const;

  /// Max-norm difference between the jets at h_fd and h_fd/2. Zero for
  /// analytic surfaces.
  double richardson_gap(double u, double v) const;

 private:
  SurfaceJet fd_jet(double u, double v, double h1, double h2) const;

  Map map_;
  JetFn jets_;
  double h_fd_ = 0.0;
  int orientation_ = +1;
};

/// Zero set of a smooth function; the oriented normal is +grad/|grad|.
struct ImplicitSurface {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;

  /// Euclidean unit normal (the g-unit normal has the same direction).
  Vec3 unit_normal(const Vec3& x) const { return gradient(x).normalized(); }
  /// Euclidean distance estimate |value| / |grad|.
  double distance_estimate(const Vec3& x) const { return std::abs(value(x)) / gradient(x).norm(); }
};

/// Second fundamental form of an implicit surface on tangent vectors a, b,
/// for the normal branch sign * grad / |grad|.
double implicit_second_form(const ConformalChart& chart, const ImplicitSurface& surface, const Vec3& x,
                            const Vec3& a, const Vec3& b, int sign = +1);

struct FundamentalForms {
  Mat2 first;
  Mat2 second;
  /// g-unit normal in chart coordinates.
  Vec3 normal;
};

FundamentalForms fundamental_forms(const ConformalChart& chart, const ParametricSurface& surface, double u,
                                   double v);
FundamentalForms fundamental_forms(const ConformalChart& chart, const SurfaceJet& jet, int orientation);

struct Curvatures {
  double mean;
  double k1;  // k1 >= k2
  double k2;
};

Curvatures mean_and_principal_curvatures(const FundamentalForms& forms);
Curvatures mean_and_principal_curvatures(const Mat2& first, const Mat2& second);

/// Inverse stereographic lift to the unit sphere in R^4 and its 4x3 Jacobian.
struct S3Lift {
  Vec4 point;
  Eigen::Matrix<double, 4, 3> jacobian;
};

S3Lift s3_lift(const Vec3& x);
/// Stereographic projection from the south pole; P_4 must not be -1.
Vec3 s3_project(const Vec4& p);

/// Geodesic of the chart metric from x with velocity v, integrated with
/// `steps` fixed RK4 steps over parameter length t.
struct GeodesicState {
  Vec3 x;
  Vec3 v;
};

GeodesicState integrate_geodesic(const ConformalChart& chart, const Vec3& x, const Vec3& v, double t, int steps);

}  // namespace geometry
}  // namespace caplab
