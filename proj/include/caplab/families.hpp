#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "caplab/domains.hpp"
#include "caplab/geometry.hpp"
#include "caplab/ovaloid.hpp"

namespace caplab::families {

using domains::Domain;
using geometry::ConformalChart;
using geometry::ImplicitSurface;

enum class FamilyTag { planes, cmc_spheres, equators_s3, translated_ovaloid };

std::string to_string(FamilyTag tag);

struct FamilyKind {
  FamilyTag tag = FamilyTag::planes;
  double H = 0.0;
  std::shared_ptr<const Ovaloid> ovaloid;

  static FamilyKind planes();
  /// H = 0 yields the plane family.
  static FamilyKind cmc_spheres(double H);
  static FamilyKind equators_s3();
  static FamilyKind translated_ovaloid(Ovaloid profile);

  /// Ambient chart the family lives in.
  ConformalChart chart() const;
  std::string describe() const;
};

/// Closed-form parameters of a member, in canonical form so that equal
/// surfaces have equal descriptors.
struct Descriptor {
  FamilyTag tag = FamilyTag::planes;
  Vec3 normal = Vec3::Zero();  // planes: unit normal
  double offset = 0.0;         // planes: normal . x on the plane
  Vec3 center = Vec3::Zero();  // spheres
  double radius = 0.0;
  int orientation = +1;        // spheres: +1 outward normal
  Vec4 pole = Vec4::Zero();    // equators
  Vec3 translation = Vec3::Zero();  // ovaloids

  /// Max-norm distance between descriptors of the same tag; infinity otherwise.
  double distance(const Descriptor& other) const;
};

struct FamilyMember {
  FamilyKind kind;
  ImplicitSurface implicit;
  Descriptor descriptor;
  Vec3 p = Vec3::Zero();
  Vec3 nu = Vec3::Zero();

  /// Points of the member computed from the descriptor, not from the level set.
  std::vector<Vec3> sample_points(int count, unsigned long long seed = 1) const;
  /// Parametric patch for curvature checks (spheres, equators, ovaloids, planes).
  geometry::ParametricSurface parametrization() const;
};

/// The unique member through p with oriented unit normal nu. nu is a
/// Euclidean direction in chart coordinates; it is normalized here.
FamilyMember member(const FamilyKind& kind, const Vec3& p, const Vec3& nu);

domains::GraphJet member_graph(const FamilyMember& m, const domains::AdaptedChart& chart, double radius = 0.1,
                               double step = 1e-3);

struct TransitivityReport {
  int samples = 0;
  int passed = 0;
  double max_value_at_p = 0.0;
  double max_normal_angle = 0.0;
  double max_descriptor_gap = 0.0;
  std::vector<std::string> failures;
  bool pass() const { return passed == samples; }
};

TransitivityReport transitivity_audit(const FamilyKind& kind, int n, unsigned long long seed = 42);

struct BoundaryPoint {
  Vec3 x;
  double angle = 0.0;
  double normal_pairing = 0.0;  // |g(N_member, N_boundary)|
  int component = 0;            // index into Domain::boundary()
};

struct ConstantAngleReport {
  bool intersects = false;
  bool transversal = false;
  int samples = 0;
  double min_angle = 0.0;
  double max_angle = 0.0;
  /// Angle range on each boundary component met; components may carry different angles.
  std::vector<std::pair<double, double>> component_range;
  double spread() const;
  std::vector<BoundaryPoint> points;
};

/// Points of member /\ boundary found by bisection on a grid over each
/// boundary component (latitude-longitude for spheres, a square box of
/// half-width plane_extent for planes).
std::vector<Vec3> boundary_intersection(const ImplicitSurface& surface, const Domain& domain, int grid = 64,
                                        double plane_extent = 4.0);

ConstantAngleReport constant_angle_audit(const FamilyMember& m, const Domain& domain, int samples = 64);
ConstantAngleReport constant_angle_audit(const ImplicitSurface& surface, const Domain& domain, int samples = 64);

enum class Topology { sphere, annulus, degenerate };
std::string to_string(Topology t);

struct TopologyResult {
  Topology topology = Topology::sphere;
  double distance_north = 0.0;  // geodesic distance from each cap pole to the equator
  double distance_south = 0.0;
};

TopologyResult intersection_topology(const FamilyMember& equator, const Domain& caps);
TopologyResult intersection_topology(const Vec4& pole, double r);

/// Quasilinear graph operators a(p,q) r + b(p,q) s + c(p,q) t - f(p,q) = 0.
enum class GraphEquation { minimal_graph, cmc_graph };

struct JetSample {
  double z = 0, p = 0, q = 0, r = 0, s = 0, t = 0;
};

struct PdeDerivatives {
  double phi_r = 0, phi_s = 0, phi_t = 0;
};

PdeDerivatives graph_operator_derivatives(GraphEquation eq, const JetSample& j);
double graph_operator(GraphEquation eq, double H, const JetSample& j);

/// Phi(x, y, eta) for surfaces of revolution: x, y principal curvatures,
/// eta the polar angle of the outward normal.
struct WeingartenRelation {
  enum class Type { mean, gauss } type = Type::mean;
  std::vector<double> table;  // T at uniform eta on [0, pi]; one entry means constant
  std::function<double(double)> interp;

  double T(double eta) const;
  double operator()(double x, double y, double eta) const;
  /// Tabulate the relation satisfied by an ovaloid.
  static WeingartenRelation induced(const Ovaloid& o, Type type, int entries = 257);
  static WeingartenRelation constant_mean(double c);  // x + y - c
};

struct EllipticityReport {
  int samples = 0;
  int failures = 0;
  double min_phi_r = 0.0;
  double min_discriminant = 0.0;  // 4 Phi_r Phi_t - Phi_s^2
  double min_product = 0.0;       // Phi_x Phi_y (Weingarten)
  bool pass() const { return samples > 0 && failures == 0; }
};

EllipticityReport pde_ellipticity_audit(GraphEquation eq, double H, const std::vector<JetSample>& jets);
/// Samples are (x, y, eta); derivatives by central differences.
EllipticityReport pde_ellipticity_audit(const WeingartenRelation& phi, const std::vector<Vec3>& samples);

}  // namespace caplab::families
