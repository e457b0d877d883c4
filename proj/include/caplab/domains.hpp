#pragma once

#include <functional>
#include <string>
#include <vector>

#include "caplab/geometry.hpp"

namespace caplab::domains {

using geometry::ConformalChart;
using geometry::ImplicitSurface;

enum class DomainKind { unit_ball, half_space, s3_two_caps };
enum class PointClass { interior, boundary, exterior };

std::string to_string(DomainKind kind);
std::string to_string(PointClass c);

/// One smooth boundary component, a round sphere or a plane in chart
/// coordinates.
struct BoundaryComponent {
  enum class Shape { sphere, plane } shape = Shape::sphere;
  Vec3 center = Vec3::Zero();  // plane: a point on it
  double radius = 1.0;
  Vec3 plane_normal = Vec3::UnitZ();  // plane: inward unit normal
  /// sphere: +1 if the inward normal of the domain is the outward radial.
  int radial_sign = -1;

  Vec3 inward_unit(const Vec3& x) const;
  double signed_distance(const Vec3& x) const;  // positive on the domain side
};

class Domain {
 public:
  static Domain unit_ball();
  static Domain half_space();
  /// S^3 minus the geodesic balls of radius r about the north and south
  /// poles, in the stereographic chart: tan(r/2) <= |x| <= cot(r/2).
  static Domain s3_two_caps(double r);

  DomainKind kind() const { return kind_; }
  const ConformalChart& chart() const { return chart_; }
  double cap_radius() const { return r_; }
  const std::vector<BoundaryComponent>& boundary() const { return boundary_; }

  /// Nonnegative exactly on the domain; zero on its boundary.
  double defining_function(const Vec3& x) const;
  /// Boundary component nearest to x.
  const BoundaryComponent& component_at(const Vec3& x) const;
  /// g-unit inward normal at a boundary point.
  Vec3 inward_normal(const Vec3& x) const;
  /// Euclidean unit outward normal; same direction as the g-unit one.
  Vec3 outward_unit(const Vec3& x) const;

 private:
  DomainKind kind_ = DomainKind::unit_ball;
  ConformalChart chart_;
  double r_ = 0.0;
  std::vector<BoundaryComponent> boundary_;
};

PointClass classify_point(const Domain& domain, const Vec3& x, double tol = 1e-9);

/// Isothermal coordinates (v, z) on the boundary component through p:
/// stereographic projection from the antipode of p for spheres, affine
/// coordinates for planes. dY(0,0) maps (1,0) to e1 and (0,1) to e2.
struct IsothermalBoundary {
  std::function<Vec3(double, double)> map;
  std::function<double(double, double)> lambda_b;
  Vec3 e1, e2;
};

IsothermalBoundary boundary_isothermal(const Domain& domain, const Vec3& p, const Vec3& t_dir);
IsothermalBoundary boundary_isothermal(const Domain& domain, const Vec3& p);

using ChartMap = std::function<Vec3(double, double, double)>;

/// Coordinates (u, v, z) -> chart point, centered at base = F(0,0,0).
struct AdaptedChart {
  ChartMap map;
  ConformalChart ambient;
  Vec3 base;
  double fd_step = 1e-3;

  /// Columns dF/du, dF/dv, dF/dz by five-point central differences.
  Mat3 jacobian(double u, double v, double z) const;
  /// g(d_i, d_j) in (u, v, z) coordinates.
  Mat3 metric_coefficients(double u, double v, double z) const;
};

/// Affine chart q + u e1 + v e2 + z n, adapted to (q, span{e1, e2}).
AdaptedChart interior_adapted_chart(const ConformalChart& ambient, const Vec3& q, const Vec3& e1, const Vec3& n);

struct BoundaryAdaptedChart {
  AdaptedChart chart;
  IsothermalBoundary boundary;
  double u_range = 0.05;
  double vz_range = 0.5;
  int geodesic_steps = 0;  // 0 for exact Euclidean lines

  Vec3 operator()(double u, double v, double z) const { return chart.map(u, v, z); }
  const Vec3& base_point() const { return chart.base; }
  double lambda_b(double v, double z) const { return boundary.lambda_b(v, z); }
};

/// F(u, v, z): normal geodesic of length u from Y(v, z) along the inward
/// g-unit normal. Curved charts use fixed-step RK4 with step <= rk4_step.
BoundaryAdaptedChart boundary_adapted_chart(const Domain& domain, const Vec3& p, const Vec3& t_dir,
                                            double u_range = 0.05, double rk4_step = 1e-3);

struct GraphDerivatives {
  double h = 0, hu = 0, hv = 0, huu = 0, huv = 0, hvv = 0, huuu = 0, huuv = 0, huvv = 0, hvvv = 0;
};

/// Local graph z = h(u, v) of an implicit surface in an adapted chart.
/// Values come from a Newton solve along the z-line; derivatives from
/// fourth-order central stencils (second order for third derivatives).
class GraphJet {
 public:
  GraphJet(ImplicitSurface surface, AdaptedChart chart, double radius, double step = 1e-3);

  double operator()(double u, double v) const;
  GraphDerivatives derivatives(double u, double v) const;
  /// First and second derivatives Richardson-extrapolated from steps h and h/2.
  GraphDerivatives refined_derivatives(double u, double v) const;
  /// (h_u, h_v) from refined axis stencils, halving the step from `step`
  /// and keeping the estimate where consecutive extrapolants agree best.
  Vec2 gradient(double u, double v) const;
  double radius() const { return radius_; }
  const AdaptedChart& chart() const { return chart_; }
  /// Re-embedded point F(u, v, h(u, v)).
  Vec3 embed(double u, double v) const;

 private:
  ImplicitSurface surface_;
  AdaptedChart chart_;
  double radius_;
  double step_;
};

/// Throws GeometryError("not a graph here") when d_z is within 1e-6 of
/// tangent to the surface at the base point.
GraphJet graph_in_chart(const ImplicitSurface& surface, const AdaptedChart& chart, double radius = 0.1,
                        double step = 1e-3);

}  // namespace caplab::domains
