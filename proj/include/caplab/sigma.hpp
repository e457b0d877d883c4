#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "caplab/domains.hpp"
#include "caplab/families.hpp"
#include "caplab/geometry.hpp"
#include "caplab/surfaces.hpp"

namespace caplab::sigma {

using families::FamilyKind;
using geometry::ConformalChart;
using geometry::ParametricSurface;

/// Raised for singular or non-Lorentzian difference tensors.
class SigmaError : public GeometryError {
 public:
  enum class Kind { singular, signature };
  SigmaError(Kind kind, const std::string& what) : GeometryError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// II of the surface minus II of the family member sharing its pointed
/// tangent plane, in the basis {X_u, X_v}. The member's second form is
/// evaluated from its level set.
Mat2 sigma_at(const ConformalChart& chart, const ParametricSurface& surface, const FamilyKind& family, double u,
              double v);

/// Same quantity with the member read off as a graph in the affine chart
/// adapted to (q, T_q Sigma) whose first axis is `e1`, then carried to the
/// {X_u, X_v} basis by the chart differential.
Mat2 sigma_via_graph(const ConformalChart& chart, const ParametricSurface& surface, const FamilyKind& family,
                     double u, double v, const Vec3& e1);

struct DirectionPair {
  double first;   // L1 branch, in [0, pi)
  double second;  // L2 branch, in [0, pi)
};

/// Null directions of sigma as angles of (cos t, sin t) in parameter
/// coordinates. Throws SigmaError for ||sigma|| < tol_sing or det >= 0.
DirectionPair asymptotic_directions(const Mat2& sigma, const Mat2& first, double tol_sing = 0.0);

/// Eigen-directions of I^{-1} sigma, larger eigenvalue first.
DirectionPair principal_directions(const Mat2& sigma, const Mat2& first);

/// Angle between parameter directions a and b measured in the metric I, in [0, pi/2].
double metric_line_angle(double a, double b, const Mat2& first);

struct HarmonicJet {
  enum class Status { ok, zero, mismatch } status = Status::zero;
  int n = 0;
  std::complex<double> alpha{0.0, 0.0};
  double residual = 0.0;  // relative spread of alpha over the radii
  std::string message;
};

std::string to_string(HarmonicJet::Status s);

struct JetOptions {
  int max_order = 8;
  double rho0 = 1e-2;
  int samples = 256;
};

/// Leading homogeneous harmonic term Re(alpha z^n) of d at the origin, from
/// Fourier coefficients on circles of radius 2 rho0, rho0, rho0/2.
HarmonicJet leading_harmonic_jet(const std::function<double(double, double)>& d, const JetOptions& opt = {});

/// Hessian of Re(alpha z^n) at (u, v).
Mat2 harmonic_hessian(int n, std::complex<double> alpha, double u, double v);

struct ModelConsistency {
  std::vector<double> radii;
  std::vector<double> residuals;  // max ||sigma - c Hess w|| / rho^(n-2) on each circle
  bool vacuous = false;
  bool decreasing() const;
  double last_ratio() const;  // residual at the smallest radius over the previous one
};

/// sigma_fn is sampled in orthonormal coordinates about the tangency point;
/// radii are visited in the given order (typically decreasing).
ModelConsistency sigma_model_consistency(const std::function<Mat2(double, double)>& sigma_fn,
                                         const HarmonicJet& jet, double c, const std::vector<double>& radii,
                                         int samples = 64);

/// Congruence by I0^{-1/2}: sigma in the orthonormal frame of I0.
Mat2 normalize_by_first_form(const Mat2& sigma, const Mat2& first0);

struct BoundaryAngleReport {
  enum class Status { checked, member_point, not_transversal } status = Status::checked;
  double mixed = 0.0;        // |(h - h~)_uv(0,0)|
  double scale = 0.0;        // max second derivative of h - h~ at the base point
  double sigma_norm = 0.0;
  double misalignment = 0.0;  // angle from principal directions to {boundary tangent, conormal}
  double h_u = 0.0;
  bool pass(double tol_mixed, double tol_angle) const {
    return status == Status::member_point || (status == Status::checked && mixed <= tol_mixed &&
                                              misalignment <= tol_angle);
  }
};

std::string to_string(BoundaryAngleReport::Status s);

/// Mixed derivative of the graph difference at a boundary point p of the
/// surface, in the boundary-adapted chart whose v-axis follows the boundary curve.
BoundaryAngleReport boundary_angle_audit(const domains::Domain& domain, const geometry::ImplicitSurface& surface,
                                         const FamilyKind& family, const Vec3& p, double tol_sing = 1e-10);

/// Sigma, first form and asymptotic angles on a parameter lattice.
struct SigmaGrid {
  std::vector<double> us, vs;
  std::vector<Mat2> sigma, first;
  std::vector<double> theta1, theta2;  // NaN on the singular set
  std::vector<char> singular;
  double max_norm = 0.0;
  double min_norm = 0.0;
  double tol_sing = 0.0;
  int lorentz_violations = 0;

  int nu() const { return static_cast<int>(us.size()); }
  int nv() const { return static_cast<int>(vs.size()); }
  int at(int i, int j) const { return i * nv() + j; }
};

/// tol_sing = max(rel_tol * max ||sigma||, abs_floor).
SigmaGrid sample_sigma_grid(const ConformalChart& chart, const ParametricSurface& surface, const FamilyKind& family,
                            const surfaces::ParamRect& rect, int nu, int nv, double rel_tol = 1e-8,
                            double abs_floor = 1e-10);

/// Grid from an explicit sigma/first-form callback (synthetic fields).
SigmaGrid sample_sigma_grid(const std::function<std::pair<Mat2, Mat2>(double, double)>& fields,
                            const surfaces::ParamRect& rect, int nu, int nv, double rel_tol = 1e-8,
                            double abs_floor = 1e-10);

struct Singularity {
  double u = 0.0, v = 0.0;
  int cells = 0;           // nodes in the cluster (0 if found between nodes)
  int twice_index = 0;
  int n = 0;               // 2 - twice_index
};

struct SingularityReport {
  std::vector<Singularity> points;
  bool non_isolated = false;
  std::string message;
};

/// Clusters of sub-tolerance nodes (4-connected) plus cells around which
/// the L1 field winds. Clusters wider than `isolation_cells` are reported
/// as a non-isolated zero set.
SingularityReport sigma_singularities(const SigmaGrid& grid, int isolation_cells = 3);

/// Columns u,v,sigma11,sigma12,sigma22,theta_L1,theta_L2,singular_flag.
void write_sigma_csv(const SigmaGrid& grid, const std::string& path);

}  // namespace caplab::sigma
