#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "caplab/geometry.hpp"

namespace caplab::index {

class IndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line field as an angle (mod pi) of the direction (cos t, sin t) at (u, v).
using DirectionField = std::function<double(double, double)>;

struct HalfIndex {
  int twice_index = 0;
  double value() const { return 0.5 * twice_index; }
};

/// Direction angles sampled along a closed curve at t in [0, 1). A final
/// sample at t = 1 is accepted if it closes the loop mod pi.
struct ClosedCurveFieldTrace {
  std::vector<double> t;
  std::vector<double> theta;
};

/// Half the change of the continuously lifted doubled angle over the loop.
/// Throws IndexError("resolution too coarse ...") when a step of the doubled
/// angle reaches pi/2.
double angular_variation(const ClosedCurveFieldTrace& trace);
/// Same lift over an open arc (no closing step).
double arc_variation(const ClosedCurveFieldTrace& trace);

/// Doubled angle lifted continuously from its first sample, one entry per sample.
std::vector<double> unwrap_doubled(const ClosedCurveFieldTrace& trace);

ClosedCurveFieldTrace trace_circle(const DirectionField& field, double cx, double cy, double r, int n = 1440);

struct IndexResult {
  HalfIndex index;
  double variation = 0.0;
  double residual = 0.0;  // |variation / 2 pi - twice_index / 2|
};

/// Throws IndexError when the rounding residual is 0.05 or more.
IndexResult index(const DirectionField& field, double cx, double cy, double r, int n = 1440);

enum class Branch { plus, minus };

/// -tan((n-2) theta) +- sec((n-2) theta); throws at the poles of sec.
double model_slope(int n, double theta, Branch branch);
/// The same direction as an angle in [0, pi), defined for every theta.
double model_angle(int n, double theta, Branch branch);
/// Direction field on the plane whose angle at polar angle theta is model_angle.
DirectionField model_field(int n, Branch branch = Branch::plus);

struct Variation {
  double closed_form = 0.0;
  double quadrature = 0.0;
  int pieces = 0;  // sub-intervals between poles of the slope
};

/// -(n-2)(theta1 - theta0)/2, and the integral of zeta'/(1+zeta^2) split at the poles.
Variation model_angular_variation(int n, double theta0, double theta1, Branch branch = Branch::plus);

/// Collar of the seam: theta_s runs along the boundary circle and tau >= 0
/// points into the surface. L1 and L2 are angles in (theta_s, tau) coordinates.
struct CollarField {
  DirectionField L1;
  DirectionField L2;
};

struct DoubleSurfaceAtlas {
  enum class Base { disk, annulus } base = Base::disk;
  double seam_period = 2.0 * M_PI;
  int boundary_circles() const { return base == Base::disk ? 1 : 2; }
  int euler_characteristic() const { return base == Base::disk ? 2 : 0; }
};

struct SeamReport {
  int samples = 0;
  double c0_gap = 0.0;          // max |wrap(2 L1 + 2 L2)| on the seam
  double derivative_gap = 0.0;  // max |d_tau 2L1 - d_tau 2L2| at tau = 0
  double tol = 1e-4;
  bool pass() const { return c0_gap <= tol && derivative_gap <= tol; }
};

SeamReport seam_check(const CollarField& field, const std::vector<double>& theta_s, double tol_seam = 1e-4,
                      double step = 1e-3);

/// L1 on copy 1 (tau >= 0) and the reflection of L2 on copy 2 (tau < 0),
/// in the collar chart of the double. Throws IndexError("capillary alignment
/// violated") when the seam check fails on `theta_s`.
DirectionField double_field(const DoubleSurfaceAtlas& atlas, const CollarField& field,
                            const std::vector<double>& theta_s, double tol_seam = 1e-4);

struct IndexedSingularity {
  double u = 0.0, v = 0.0;
  double radius = 0.0;  // index circle; 0 for points at infinity
  HalfIndex index;
  std::string label;
};

struct PoincareHopfReport {
  int twice_sum = 0;
  int euler_characteristic = 0;
  bool consistent() const { return twice_sum == 2 * euler_characteristic; }
  double sum() const { return 0.5 * twice_sum; }
};

std::string verdict(const PoincareHopfReport& r);

/// Throws IndexError("overlapping index circles") when two finite circles meet.
PoincareHopfReport poincare_hopf_audit(const std::vector<IndexedSingularity>& singularities, int euler_characteristic);

/// Line field theta = -arg(q)/2 of the quadratic differential
/// q(z) dz^2 = c prod (z - z_k)^{m_k} dz^2 on the Riemann sphere.
struct QuadraticDifferential {
  std::complex<double> scale{1.0, 0.0};
  std::vector<std::pair<std::complex<double>, int>> factors;

  std::complex<double> operator()(std::complex<double> z) const;
  int degree() const;
  /// Field in the chart z (finite points) or w = 1/z (infinity).
  DirectionField field() const;
  DirectionField field_at_infinity() const;
  /// Order of the zero (negative for poles) at infinity.
  int order_at_infinity() const { return -degree() - 4; }
};

/// Index every zero, pole and the point at infinity (when singular) on
/// circles of a third of the minimal separation.
std::vector<IndexedSingularity> sphere_field_indices(const QuadraticDifferential& q, int samples = 1440);

}  // namespace caplab::index
