#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "caplab/domains.hpp"
#include "caplab/families.hpp"
#include "caplab/geometry.hpp"
#include "caplab/sigma.hpp"
#include "caplab/surfaces.hpp"

namespace caplab::capillary {

using domains::Domain;
using geometry::ImplicitSurface;

/// Dihedral angle between a surface and the domain boundary at a point of
/// their intersection, computed from the two unit normals and from the
/// pairing of the two conormals of the intersection curve.
struct ContactAngle {
  double alpha = 0.0;
  double cos_normals = 0.0;    // g(N_Sigma, N_out)
  double cos_conormals = 0.0;  // g(nu_Sigma, nu_c)
  double gap = 0.0;
};

/// Throws GeometryError("tangential intersection") when the normals are parallel.
ContactAngle contact_angle(const Domain& domain, const ImplicitSurface& surface, const Vec3& x);
ContactAngle contact_angle(const Domain& domain, const geometry::SurfaceJet& jet, int orientation);

enum class Verdict { pass, fail, degenerate };
std::string to_string(Verdict v);

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

/// value <= tol (NaN fails).
Check check_below(std::string name, double value, double tol, std::string note = {});
/// value >= tol.
Check check_above(std::string name, double value, double tol, std::string note = {});

struct ScenarioResult {
  std::string scenario;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<Check> checks;
  Verdict verdict = Verdict::fail;
  std::string conclusion;
  std::optional<sigma::SigmaGrid> grid;

  bool all_pass() const;
  /// pass iff every check passes; degenerate verdicts are left untouched.
  void settle(const std::string& if_pass, const std::string& if_fail);
};

/// Residual of the boundary equation along u = 0 of a boundary-adapted chart:
/// -g_uu (1 + h_v^2) cos^2(alpha) + lambda_b^2 h_u^2 sin^2(alpha),
/// divided by scale = max(g_uu, lambda_b^2) at the base point.
struct ResidualReport {
  std::vector<double> v;
  std::vector<double> residual;
  double scale = 1.0;
  double max_abs = 0.0;
};

ResidualReport boundary_residual(const domains::GraphJet& h, const domains::BoundaryAdaptedChart& chart,
                                 double alpha, const std::vector<double>& vs);

/// Convenience: build the chart at a boundary point of `surface` and evaluate
/// the residual at v in [-v_max, v_max].
ResidualReport boundary_residual_at(const Domain& domain, const ImplicitSurface& surface, const Vec3& p, double alpha,
                                    int nv = 5, double v_max = 0.02);

struct Cos2Sample {
  Vec3 x;
  double closed_form = 0.0;
  double direct = 0.0;
  double rel_error = 0.0;
};

struct Cos2Report {
  std::vector<Cos2Sample> samples;
  double max_rel_error = 0.0;
};

/// cos^2(alpha) = h_u^2 lambda^2 / (g_uu + h_u^2 lambda^2 + h_v^2 g_uu) against the
/// contact angle. Relative errors are taken against max(direct, 1e-4).
Cos2Report cos2_formula_check(const Domain& domain, const ImplicitSurface& surface,
                              const std::vector<Vec3>& boundary_points);

/// Capillary cap in the unit ball: sphere of radius 1/|H| centered on the
/// x3-axis (a horizontal disk for H = 0) meeting the unit sphere at angle alpha.
struct NitscheCap {
  double H = 0.0;
  double alpha = 0.0;
  double radius = 0.0;    // sphere radius; 0 for the disk
  double distance = 0.0;  // center height (disk height for H = 0)
  double theta_b = 0.0;   // polar angle of the boundary circle about -x3 from the center
  double boundary_height = 0.0;
  double boundary_radius = 0.0;
  surfaces::SurfacePatch patch;

  Vec3 boundary_point(double phi) const;
};

/// Throws std::invalid_argument for alpha outside (0, pi) or a cap that
/// does not fit the ball.
NitscheCap nitsche_cap(double H, double alpha, double bump = 0.0);

struct NitscheOptions {
  double alpha_claimed = -1.0;  // negative: use the construction angle
  double bump = 0.0;            // radial perturbation amplitude (negative control)
  int grid = 32;
  int boundary_samples = 16;
  double tol_sigma = 1e-8;
  double tol_residual = 1e-8;
  double tol_spread = 1e-9;
};

ScenarioResult nitsche_scenario(double H, double alpha, const NitscheOptions& opt = {});

/// Neck radius a and height parameter t of the catenoid meeting the unit
/// sphere orthogonally (t tanh t = 1, a^2 (cosh^2 t + t^2) = 1).
struct CatenoidNeck {
  double a = 0.0;
  double t = 0.0;
  int iterations = 0;
};

CatenoidNeck critical_catenoid_neck(double a0 = 0.5);
/// Height parameter where the catenoid of neck a leaves the unit ball.
double catenoid_exit_parameter(double a);

enum class AnnulusInput { critical_catenoid, squeezed_catenoid, sphere_cap };

struct AnnulusOptions {
  AnnulusInput input = AnnulusInput::critical_catenoid;
  double squeeze = 0.9;
  int grid = 200;
  double tol_angle = 1e-6;
};

ScenarioResult annulus_scenario(const AnnulusOptions& opt = {});

/// Half catenoid with axis along x1 in the upper half space, boundary on
/// x3 = 0. With twist != 0 the surface x2 = twist x1 x3 is used instead.
struct FreeBoundaryOptions {
  double neck = 1.0;
  double twist = 0.0;
  int boundary_samples = 16;
  double extent = 0.8;
  double tol_mixed = 1e-6;
  double tol_angle = 1e-4;
  double tol_seam = 1e-4;
  bool swap_branches = false;
};

ScenarioResult free_boundary_catenoid_scenario(const FreeBoundaryOptions& opt = {});

struct WeingartenOptions {
  std::string relation = "induced_mean";  // induced_mean, induced_gauss, constant_mean
  double constant = 2.0;
  int samples = 200;
  int members = 8;
  unsigned long long seed = 42;
  double tol_relation = 1e-8;
  double tol_spread = 1e-8;
};

ScenarioResult weingarten_family_check(const families::Ovaloid& profile, const WeingartenOptions& opt = {});

struct S3ScanReport {
  double r = 0.0;
  int samples = 0;
  int spheres = 0;
  int annuli = 0;
  int degenerate = 0;
  int disks = 0;
  int angle_checks = 0;
  double max_angle_spread = 0.0;
  std::vector<Vec4> poles;
  std::vector<families::Topology> topologies;
  double annulus_fraction() const { return samples > degenerate ? double(annuli) / (samples - degenerate) : 0.0; }
};

/// Uniform random equators; boundary circles are counted on the equator
/// itself, so a disk would be a single circle.
S3ScanReport s3_nonexistence_scan(double r, int n, unsigned long long seed = 42, int angle_checks = 10);
ScenarioResult s3_scan_scenario(double r, int n, unsigned long long seed = 42, double tol_spread = 1e-8);

}  // namespace caplab::capillary
