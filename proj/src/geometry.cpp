#include "caplab/geometry.hpp"

#include <cmath>

namespace caplab::geometry {

std::string to_string(ChartKind kind) {
  return kind == ChartKind::euclidean ? "euclidean" : "sphere3";
}

double ConformalChart::lambda(const Vec3& x) const {
  if (kind_ == ChartKind::euclidean) return 1.0;
  return 2.0 / (1.0 + x.squaredNorm());
}

Vec3 ConformalChart::lambda_grad(const Vec3& x) const {
  if (kind_ == ChartKind::euclidean) return Vec3::Zero();
  const double d = 1.0 + x.squaredNorm();
  return -4.0 * x / (d * d);
}

Vec3 ConformalChart::log_lambda_grad(const Vec3& x) const {
  if (kind_ == ChartKind::euclidean) return Vec3::Zero();
  return -2.0 * x / (1.0 + x.squaredNorm());
}

double ConformalChart::inner(const Vec3& x, const Vec3& a, const Vec3& b) const {
  const double l = lambda(x);
  return l * l * a.dot(b);
}

double ConformalChart::norm(const Vec3& x, const Vec3& a) const { return lambda(x) * a.norm(); }

Vec3 ConformalChart::christoffel_contract(const Vec3& x, const Vec3& a, const Vec3& b) const {
  if (kind_ == ChartKind::euclidean) return Vec3::Zero();
  const Vec3 dphi = log_lambda_grad(x);
  return a * b.dot(dphi) + b * a.dot(dphi) - a.dot(b) * dphi;
}

Mat3 metric_at(const ConformalChart& chart, const Vec3& x) {
  const double l = chart.lambda(x);
  return l * l * Mat3::Identity();
}

Christoffel christoffel(const ConformalChart& chart, const Vec3& x) {
  const Vec3 dphi = chart.log_lambda_grad(x);
  Christoffel gamma;
  for (int k = 0; k < 3; ++k) {
    Mat3 g = Mat3::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        g(i, j) = (i == k ? dphi(j) : 0.0) + (j == k ? dphi(i) : 0.0) - (i == j ? dphi(k) : 0.0);
      }
    }
    gamma[k] = g;
  }
  return gamma;
}

double sectional_curvature(const ConformalChart& chart, const Vec3& x, const Vec3& a, const Vec3& b,
                           double step) {
  // R(a,b)b = (D_a Gamma)(b,b) - (D_b Gamma)(a,b) + Gamma(a, Gamma(b,b)) - Gamma(b, Gamma(a,b))
  auto directional = [&](const Vec3& dir, const Vec3& p, const Vec3& q) -> Vec3 {
    return (chart.christoffel_contract(x + step * dir, p, q) - chart.christoffel_contract(x - step * dir, p, q)) /
           (2.0 * step);
  };
  const Vec3 rab_b = directional(a, b, b) - directional(b, a, b) +
                     chart.christoffel_contract(x, a, chart.christoffel_contract(x, b, b)) -
                     chart.christoffel_contract(x, b, chart.christoffel_contract(x, a, b));
  const double num = chart.inner(x, rab_b, a);
  const double den = chart.inner(x, a, a) * chart.inner(x, b, b) - std::pow(chart.inner(x, a, b), 2);
  return num / den;
}

ParametricSurface ParametricSurface::analytic(JetFn jets, int orientation) {
  ParametricSurface s;
  s.jets_ = std::move(jets);
  auto j = s.jets_;
  s.map_ = [j](double u, double v) { return j(u, v).x; };
  s.orientation_ = orientation >= 0 ? +1 : -1;
  return s;
}

ParametricSurface ParametricSurface::finite_difference(Map map, double h_fd, int orientation) {
  if (!(h_fd > 0.0)) throw GeometryError("finite-difference step must be positive");
  ParametricSurface s;
  s.map_ = std::move(map);
  s.h_fd_ = h_fd;
  s.orientation_ = orientation >= 0 ? +1 : -1;
  return s;
}

ParametricSurface ParametricSurface::flipped() const {
  ParametricSurface s = *this;
  s.orientation_ = -orientation_;
  return s;
}

SurfaceJet ParametricSurface::fd_jet(double u, double v, double h1, double h2) const {
  SurfaceJet j;
  j.x = map_(u, v);
  j.xu = (map_(u + h1, v) - map_(u - h1, v)) / (2.0 * h1);
  j.xv = (map_(u, v + h1) - map_(u, v - h1)) / (2.0 * h1);
  j.xuu = (map_(u + h2, v) - 2.0 * j.x + map_(u - h2, v)) / (h2 * h2);
  j.xvv = (map_(u, v + h2) - 2.0 * j.x + map_(u, v - h2)) / (h2 * h2);
  j.xuv = (map_(u + h2, v + h2) - map_(u + h2, v - h2) - map_(u - h2, v + h2) + map_(u - h2, v - h2)) /
          (4.0 * h2 * h2);
  return j;
}

SurfaceJet ParametricSurface::jet(double u, double v) const {
  if (jets_) return jets_(u, v);
  return fd_jet(u, v, h_fd_, 10.0 * h_fd_);
}

double ParametricSurface::richardson_gap(double u, double v) const {
  if (jets_) return 0.0;
  const SurfaceJet a = fd_jet(u, v, h_fd_, 10.0 * h_fd_);
  const SurfaceJet b = fd_jet(u, v, 0.5 * h_fd_, 5.0 * h_fd_);
  double gap = 0.0;
  for (const auto& [p, q] : {std::pair{a.xu, b.xu}, {a.xv, b.xv}, {a.xuu, b.xuu}, {a.xuv, b.xuv}, {a.xvv, b.xvv}}) {
    gap = std::max(gap, (p - q).cwiseAbs().maxCoeff());
  }
  return gap;
}

double implicit_second_form(const ConformalChart& chart, const ImplicitSurface& surface, const Vec3& x,
                            const Vec3& a, const Vec3& b, int sign) {
  const Vec3 grad = surface.gradient(x);
  const Mat3 hess = surface.hessian(x);
  const double gn = grad.norm();
  return sign * chart.lambda(x) / gn * (-a.dot(hess * b) + chart.christoffel_contract(x, a, b).dot(grad));
}

FundamentalForms fundamental_forms(const ConformalChart& chart, const SurfaceJet& j, int orientation) {
  const Vec3 cross = j.xu.cross(j.xv);
  const double cn = cross.norm();
  const double scale = j.xu.norm() * j.xv.norm();
  if (!(cn > 1e-12 * scale) || !(scale > 0.0)) {
    throw GeometryError("degenerate first fundamental form (not an immersion)");
  }
  const double l = chart.lambda(j.x);
  FundamentalForms f;
  f.normal = (orientation >= 0 ? 1.0 : -1.0) * cross / (cn * l);
  const Vec3* t[2] = {&j.xu, &j.xv};
  const Vec3* second[2][2] = {{&j.xuu, &j.xuv}, {&j.xuv, &j.xvv}};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      f.first(a, b) = chart.inner(j.x, *t[a], *t[b]);
      const Vec3 cov = *second[a][b] + chart.christoffel_contract(j.x, *t[a], *t[b]);
      f.second(a, b) = chart.inner(j.x, cov, f.normal);
    }
  }
  return f;
}

FundamentalForms fundamental_forms(const ConformalChart& chart, const ParametricSurface& surface, double u,
                                   double v) {
  return fundamental_forms(chart, surface.jet(u, v), surface.orientation());
}

Curvatures mean_and_principal_curvatures(const Mat2& first, const Mat2& second) {
  // Symmetric form L^-1 II L^-T avoids the cancellation in H^2 - K near umbilics.
  const Eigen::LLT<Mat2> llt(first);
  if (llt.info() != Eigen::Success) throw GeometryError("first fundamental form is not positive definite");
  const Mat2 li = llt.matrixL().solve(Mat2::Identity());
  const Mat2 s = li * second * li.transpose();
  const double h = 0.5 * (s(0, 0) + s(1, 1));
  const double disc = std::hypot(0.5 * (s(0, 0) - s(1, 1)), 0.5 * (s(0, 1) + s(1, 0)));
  return {h, h + disc, h - disc};
}

Curvatures mean_and_principal_curvatures(const FundamentalForms& forms) {
  return mean_and_principal_curvatures(forms.first, forms.second);
}

S3Lift s3_lift(const Vec3& x) {
  const double s = x.squaredNorm();
  const double d = 1.0 + s;
  S3Lift lift;
  lift.point << 2.0 * x / d, (1.0 - s) / d;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      lift.jacobian(k, i) = (k == i ? 2.0 / d : 0.0) - 4.0 * x(k) * x(i) / (d * d);
    }
    lift.jacobian(3, i) = -4.0 * x(i) / (d * d);
  }
  return lift;
}

Vec3 s3_project(const Vec4& p) {
  const double d = 1.0 + p(3);
  if (!(std::abs(d) > 1e-300)) throw GeometryError("stereographic projection of the south pole");
  return p.head<3>() / d;
}

GeodesicState integrate_geodesic(const ConformalChart& chart, const Vec3& x0, const Vec3& v0, double t, int steps) {
  if (chart.kind() == ChartKind::euclidean) return {x0 + t * v0, v0};
  const double h = t / steps;
  auto accel = [&](const Vec3& x, const Vec3& v) -> Vec3 { return -chart.christoffel_contract(x, v, v); };
  Vec3 x = x0;
  Vec3 v = v0;
  for (int i = 0; i < steps; ++i) {
    const Vec3 k1x = v;
    const Vec3 k1v = accel(x, v);
    const Vec3 k2x = v + 0.5 * h * k1v;
    const Vec3 k2v = accel(x + 0.5 * h * k1x, k2x);
    const Vec3 k3x = v + 0.5 * h * k2v;
    const Vec3 k3v = accel(x + 0.5 * h * k2x, k3x);
    const Vec3 k4x = v + h * k3v;
    const Vec3 k4v = accel(x + h * k3x, k4x);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return {x, v};
}

}  // namespace caplab::geometry
