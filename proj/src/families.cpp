#include "caplab/families.hpp"

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "caplab/capillary.hpp"
#include "caplab/surfaces.hpp"

namespace caplab::families {

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::planes: return "planes";
    case FamilyTag::cmc_spheres: return "cmc_spheres";
    case FamilyTag::equators_s3: return "equators_s3";
    case FamilyTag::translated_ovaloid: return "translated_ovaloid";
  }
  return "?";
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::sphere: return "sphere";
    case Topology::annulus: return "annulus";
    case Topology::degenerate: return "degenerate";
  }
  return "?";
}

FamilyKind FamilyKind::planes() { return {}; }

FamilyKind FamilyKind::cmc_spheres(double H) {
  if (H == 0.0) return planes();
  FamilyKind k;
  k.tag = FamilyTag::cmc_spheres;
  k.H = H;
  return k;
}

FamilyKind FamilyKind::equators_s3() {
  FamilyKind k;
  k.tag = FamilyTag::equators_s3;
  return k;
}

FamilyKind FamilyKind::translated_ovaloid(Ovaloid profile) {
  const auto v = profile.validate();
  if (!v.ok()) throw GeometryError("ovaloid profile rejected: " + v.reason);
  FamilyKind k;
  k.tag = FamilyTag::translated_ovaloid;
  k.ovaloid = std::make_shared<const Ovaloid>(std::move(profile));
  return k;
}

ConformalChart FamilyKind::chart() const {
  return tag == FamilyTag::equators_s3 ? ConformalChart::sphere3() : ConformalChart::euclidean();
}

std::string FamilyKind::describe() const {
  std::ostringstream s;
  s << to_string(tag);
  if (tag == FamilyTag::cmc_spheres) s << "(H=" << H << ")";
  if (tag == FamilyTag::translated_ovaloid) s << "(" << ovaloid->name() << ")";
  return s.str();
}

double Descriptor::distance(const Descriptor& o) const {
  if (tag != o.tag) return std::numeric_limits<double>::infinity();
  switch (tag) {
    case FamilyTag::planes:
      return std::max((normal - o.normal).cwiseAbs().maxCoeff(), std::abs(offset - o.offset));
    case FamilyTag::cmc_spheres:
      if (orientation != o.orientation) return std::numeric_limits<double>::infinity();
      return std::max((center - o.center).cwiseAbs().maxCoeff(), std::abs(radius - o.radius));
    case FamilyTag::equators_s3: return (pole - o.pole).cwiseAbs().maxCoeff();
    case FamilyTag::translated_ovaloid: return (translation - o.translation).cwiseAbs().maxCoeff();
  }
  return std::numeric_limits<double>::infinity();
}

FamilyMember member(const FamilyKind& kind, const Vec3& p, const Vec3& nu_in) {
  if (!(nu_in.norm() > 0.0)) throw GeometryError("member normal must be nonzero");
  const Vec3 nu = nu_in.normalized();
  FamilyMember m;
  m.kind = kind;
  m.p = p;
  m.nu = nu;
  m.descriptor.tag = kind.tag;
  switch (kind.tag) {
    case FamilyTag::planes:
      m.descriptor.normal = nu;
      m.descriptor.offset = nu.dot(p);
      m.implicit = surfaces::implicit_plane(p, nu);
      break;
    case FamilyTag::cmc_spheres: {
      // Mean curvature vector H nu: the center lies on the nu side for H > 0.
      const double R = 1.0 / std::abs(kind.H);
      m.descriptor.center = p + nu / kind.H;
      m.descriptor.radius = R;
      m.descriptor.orientation = kind.H > 0.0 ? -1 : +1;
      m.implicit = surfaces::implicit_sphere(m.descriptor.center, R, m.descriptor.orientation);
      break;
    }
    case FamilyTag::equators_s3: {
      const auto lift = geometry::s3_lift(p);
      const Vec4 a = (lift.jacobian * nu).normalized();
      m.descriptor.pole = a;
      m.implicit = surfaces::implicit_equator(a);
      break;
    }
    case FamilyTag::translated_ovaloid: {
      if (!kind.ovaloid) throw GeometryError("ovaloid family without a profile");
      m.descriptor.translation = p - kind.ovaloid->point_with_normal(nu);
      m.implicit = kind.ovaloid->implicit(m.descriptor.translation);
      break;
    }
  }
  return m;
}

std::vector<Vec3> FamilyMember::sample_points(int count, unsigned long long seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(count);
  const Descriptor& d = descriptor;
  while (static_cast<int>(out.size()) < count) {
    switch (d.tag) {
      case FamilyTag::planes: {
        const Vec3 w(g(rng), g(rng), g(rng));
        out.push_back(d.offset * d.normal + (w - w.dot(d.normal) * d.normal));
        break;
      }
      case FamilyTag::cmc_spheres:
        out.push_back(d.center + d.radius * Vec3(g(rng), g(rng), g(rng)).normalized());
        break;
      case FamilyTag::equators_s3: {
        Vec4 x(g(rng), g(rng), g(rng), g(rng));
        x -= x.dot(d.pole) * d.pole;
        x.normalize();
        if (x(3) < -0.9) continue;  // keep away from the point missing from the chart
        out.push_back(geometry::s3_project(x));
        break;
      }
      case FamilyTag::translated_ovaloid:
        out.push_back(d.translation + kind.ovaloid->point(std::acos(2.0 * uni(rng) - 1.0), 2.0 * M_PI * uni(rng)));
        break;
    }
  }
  return out;
}

geometry::ParametricSurface FamilyMember::parametrization() const {
  const Descriptor& d = descriptor;
  switch (d.tag) {
    case FamilyTag::planes: return surfaces::plane_patch(p, d.normal, 1.0).param;
    case FamilyTag::cmc_spheres:
      return surfaces::sphere_patch(d.center, d.radius, Vec3::UnitZ(), 0.05, M_PI - 0.05, d.orientation).param;
    case FamilyTag::equators_s3: return surfaces::equator_patch(d.pole).param;
    case FamilyTag::translated_ovaloid: return kind.ovaloid->parametrization(d.translation);
  }
  throw GeometryError("unknown family");
}

domains::GraphJet member_graph(const FamilyMember& m, const domains::AdaptedChart& chart, double radius,
                               double step) {
  return domains::graph_in_chart(m.implicit, chart, radius, step);
}

namespace {

double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

}  // namespace

TransitivityReport transitivity_audit(const FamilyKind& kind, int n, unsigned long long seed) {
  TransitivityReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::normal_distribution<double> g;
  const double scale = kind.tag == FamilyTag::equators_s3 || kind.tag == FamilyTag::translated_ovaloid ? 2.0 : 1.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = scale * Vec3(box(rng), box(rng), box(rng));
    const Vec3 nu = Vec3(g(rng), g(rng), g(rng)).normalized();
    ++rep.samples;
    std::ostringstream why;
    try {
      const FamilyMember m = member(kind, p, nu);
      const double v = std::abs(m.implicit.value(p));
      const double ang = angle_between(m.implicit.gradient(p), nu);
      const FamilyMember again = member(kind, p, nu);
      const double same = m.descriptor.distance(again.descriptor);
      // Uniqueness: rebuild from another point of the same surface.
      const Vec3 q = m.sample_points(1, seed + i)[0];
      const FamilyMember other = member(kind, q, m.implicit.gradient(q));
      const double gap = m.descriptor.distance(other.descriptor);
      rep.max_value_at_p = std::max(rep.max_value_at_p, v);
      rep.max_normal_angle = std::max(rep.max_normal_angle, ang);
      rep.max_descriptor_gap = std::max(rep.max_descriptor_gap, gap);
      if (v >= 1e-10) why << " |Psi(p)|=" << v;
      if (ang >= 1e-8) why << " normal angle=" << ang;
      if (same != 0.0) why << " nondeterministic";
      if (!(gap < 1e-8)) why << " descriptor gap=" << gap;
    } catch (const std::exception& e) {
      why << " " << e.what();
    }
    if (why.str().empty()) {
      ++rep.passed;
    } else {
      rep.failures.push_back("sample " + std::to_string(i) + ":" + why.str());
    }
  }
  return rep;
}

namespace {

template <class Point>
void bisect_edges(const ImplicitSurface& s, const std::vector<std::vector<Vec3>>& nodes,
                  const std::vector<std::vector<double>>& vals, const Point& point_at, std::vector<Vec3>& out) {
  const int ni = static_cast<int>(nodes.size()), nj = static_cast<int>(nodes[0].size());
  auto refine = [&](int i0, int j0, int i1, int j1) {
    double f0 = vals[i0][j0];
    double t0 = 0.0, t1 = 1.0;
    if (f0 == 0.0) {
      out.push_back(nodes[i0][j0]);
      return;
    }
    for (int it = 0; it < 100 && t1 - t0 > 1e-15; ++it) {
      const double tm = 0.5 * (t0 + t1);
      const double fm = s.value(point_at(i0, j0, i1, j1, tm));
      if ((fm > 0.0) == (f0 > 0.0)) {
        t0 = tm;
        f0 = fm;
      } else {
        t1 = tm;
      }
    }
    out.push_back(point_at(i0, j0, i1, j1, 0.5 * (t0 + t1)));
  };
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j) {
      if (i + 1 < ni && (vals[i][j] > 0.0) != (vals[i + 1][j] > 0.0)) refine(i, j, i + 1, j);
      if (j + 1 < nj && (vals[i][j] > 0.0) != (vals[i][j + 1] > 0.0)) refine(i, j, i, j + 1);
    }
}

}  // namespace

std::vector<Vec3> boundary_intersection(const ImplicitSurface& surface, const Domain& domain, int grid,
                                        double plane_extent) {
  std::vector<Vec3> out;
  for (const auto& comp : domain.boundary()) {
    if (comp.shape == domains::BoundaryComponent::Shape::sphere) {
      const int nt = grid, np = 2 * grid;
      auto at = [&](double th, double ph) {
        return Vec3(comp.center + comp.radius * Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                                     std::cos(th)));
      };
      // Offset the grid so that nodes avoid the coordinate poles.
      auto theta = [&](double i) { return M_PI * (i + 0.5) / nt; };
      auto phi = [&](double j) { return 2.0 * M_PI * j / np + 0.1234; };
      std::vector<std::vector<Vec3>> nodes(nt, std::vector<Vec3>(np + 1));
      std::vector<std::vector<double>> vals(nt, std::vector<double>(np + 1));
      for (int i = 0; i < nt; ++i)
        for (int j = 0; j <= np; ++j) {
          nodes[i][j] = at(theta(i), phi(j));
          vals[i][j] = surface.value(nodes[i][j]);
        }
      bisect_edges(surface, nodes, vals,
                   [&](int i0, int j0, int i1, int j1, double t) {
                     return at(theta(i0 + t * (i1 - i0)), phi(j0 + t * (j1 - j0)));
                   },
                   out);
    } else {
      const Vec3 n = comp.plane_normal;
      const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      const Vec3 e1 = (seed - seed.dot(n) * n).normalized(), e2 = n.cross(e1);
      const int m = 2 * grid;
      auto at = [&](double a, double b) {
        return Vec3(comp.center + plane_extent * ((2.0 * a / m - 1.0) * e1 + (2.0 * b / m - 1.0) * e2));
      };
      std::vector<std::vector<Vec3>> nodes(m + 1, std::vector<Vec3>(m + 1));
      std::vector<std::vector<double>> vals(m + 1, std::vector<double>(m + 1));
      for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
          nodes[i][j] = at(i + 0.01, j + 0.013);
          vals[i][j] = surface.value(nodes[i][j]);
        }
      bisect_edges(surface, nodes, vals,
                   [&](int i0, int j0, int i1, int j1, double t) {
                     return at(i0 + t * (i1 - i0) + 0.01, j0 + t * (j1 - j0) + 0.013);
                   },
                   out);
    }
  }
  return out;
}

double ConstantAngleReport::spread() const {
  double s = 0.0;
  for (const auto& [lo, hi] : component_range)
    if (hi >= lo) s = std::max(s, hi - lo);
  return s;
}

ConstantAngleReport constant_angle_audit(const ImplicitSurface& surface, const Domain& domain, int samples) {
  ConstantAngleReport rep;
  std::vector<Vec3> roots = boundary_intersection(surface, domain, std::max(32, samples / 2));
  if (roots.empty()) return rep;
  rep.intersects = true;
  rep.transversal = true;
  const std::size_t stride = std::max<std::size_t>(1, roots.size() / std::max(1, samples));
  const double inf = std::numeric_limits<double>::infinity();
  rep.min_angle = inf;
  rep.max_angle = -inf;
  rep.component_range.assign(domain.boundary().size(), {inf, -inf});
  for (std::size_t k = 0; k < roots.size() && rep.samples < samples; k += stride) {
    BoundaryPoint bp;
    bp.x = roots[k];
    bp.component = static_cast<int>(&domain.component_at(bp.x) - domain.boundary().data());
    const Vec3 nb = domain.outward_unit(bp.x);
    const Vec3 ns = surface.unit_normal(bp.x);
    bp.normal_pairing = std::abs(nb.dot(ns));
    if (!(bp.normal_pairing < 1.0 - 1e-8)) {
      rep.transversal = false;
      rep.points.push_back(bp);
      continue;
    }
    bp.angle = capillary::contact_angle(domain, surface, bp.x).alpha;
    rep.min_angle = std::min(rep.min_angle, bp.angle);
    rep.max_angle = std::max(rep.max_angle, bp.angle);
    auto& range = rep.component_range[bp.component];
    range = {std::min(range.first, bp.angle), std::max(range.second, bp.angle)};
    rep.points.push_back(bp);
    ++rep.samples;
  }
  if (rep.samples == 0) rep.min_angle = rep.max_angle = 0.0;
  return rep;
}

ConstantAngleReport constant_angle_audit(const FamilyMember& m, const Domain& domain, int samples) {
  return constant_angle_audit(m.implicit, domain, samples);
}

TopologyResult intersection_topology(const Vec4& pole, double r) {
  // Cap poles are (0,0,0,+-1); the equator's distance to each is asin|a_4|.
  const Vec4 a = pole.normalized();
  TopologyResult t;
  t.distance_north = std::asin(std::min(1.0, std::abs(a(3))));
  t.distance_south = std::asin(std::min(1.0, std::abs(-a(3))));
  if (std::abs(t.distance_north - r) < 1e-9) {
    t.topology = Topology::degenerate;
  } else {
    t.topology = t.distance_north < r ? Topology::annulus : Topology::sphere;
  }
  return t;
}

TopologyResult intersection_topology(const FamilyMember& equator, const Domain& caps) {
  if (equator.kind.tag != FamilyTag::equators_s3) throw GeometryError("intersection_topology needs an equator");
  if (caps.kind() != domains::DomainKind::s3_two_caps) throw GeometryError("intersection_topology needs s3_two_caps");
  return intersection_topology(equator.descriptor.pole, caps.cap_radius());
}

PdeDerivatives graph_operator_derivatives(GraphEquation, const JetSample& j) {
  // Both operators share the principal part (1+q^2) r - 2 p q s + (1+p^2) t.
  return {1.0 + j.q * j.q, -2.0 * j.p * j.q, 1.0 + j.p * j.p};
}

double graph_operator(GraphEquation eq, double H, const JetSample& j) {
  const double w2 = 1.0 + j.p * j.p + j.q * j.q;
  const double principal = (1.0 + j.q * j.q) * j.r - 2.0 * j.p * j.q * j.s + (1.0 + j.p * j.p) * j.t;
  return eq == GraphEquation::minimal_graph ? principal : principal - 2.0 * H * std::pow(w2, 1.5);
}

double WeingartenRelation::T(double eta) const {
  if (interp) return interp(eta);
  if (table.size() == 1) return table[0];
  throw GeometryError("Weingarten relation without a table");
}

double WeingartenRelation::operator()(double x, double y, double eta) const {
  return (type == Type::mean ? x + y : x * y) - T(eta);
}

WeingartenRelation WeingartenRelation::constant_mean(double c) {
  WeingartenRelation w;
  w.type = Type::mean;
  w.table = {c};
  return w;
}

WeingartenRelation WeingartenRelation::induced(const Ovaloid& o, Type type, int entries) {
  if (entries < 8) throw GeometryError("Weingarten table needs at least 8 entries");
  WeingartenRelation w;
  w.type = type;
  w.table.resize(entries);
  const double h = M_PI / (entries - 1);
  for (int k = 0; k < entries; ++k) {
    const double th = o.invert_gauss(std::min(M_PI, k * h));
    const double k1 = o.meridian_curvature(th), k2 = o.parallel_curvature(th);
    w.table[k] = type == Type::mean ? k1 + k2 : k1 * k2;
  }
  // T is even about both poles, so its first derivative vanishes there.
  auto spline = std::make_shared<boost::math::interpolators::cardinal_quintic_b_spline<double>>(
      w.table, 0.0, h, std::pair<double, double>{0.0, std::numeric_limits<double>::quiet_NaN()},
      std::pair<double, double>{0.0, std::numeric_limits<double>::quiet_NaN()});
  w.interp = [spline](double eta) { return (*spline)(std::clamp(eta, 0.0, M_PI)); };
  return w;
}

EllipticityReport pde_ellipticity_audit(GraphEquation eq, double, const std::vector<JetSample>& jets) {
  EllipticityReport rep;
  rep.min_phi_r = rep.min_discriminant = std::numeric_limits<double>::infinity();
  rep.min_product = 0.0;
  for (const auto& j : jets) {
    if (!(std::isfinite(j.p) && std::isfinite(j.q) && std::isfinite(j.r) && std::isfinite(j.s) &&
          std::isfinite(j.t)))
      throw GeometryError("jet sample outside the equation domain");
    const auto d = graph_operator_derivatives(eq, j);
    const double disc = 4.0 * d.phi_r * d.phi_t - d.phi_s * d.phi_s;
    rep.min_phi_r = std::min(rep.min_phi_r, d.phi_r);
    rep.min_discriminant = std::min(rep.min_discriminant, disc);
    ++rep.samples;
    if (!(d.phi_r > 0.0 && disc > 0.0)) ++rep.failures;
  }
  return rep;
}

EllipticityReport pde_ellipticity_audit(const WeingartenRelation& phi, const std::vector<Vec3>& samples) {
  EllipticityReport rep;
  rep.min_product = std::numeric_limits<double>::infinity();
  const double h = 1e-6;
  for (const Vec3& s : samples) {
    if (!(s.z() >= 0.0 && s.z() <= M_PI)) throw GeometryError("normal angle outside [0, pi]");
    const double px = (phi(s.x() + h, s.y(), s.z()) - phi(s.x() - h, s.y(), s.z())) / (2.0 * h);
    const double py = (phi(s.x(), s.y() + h, s.z()) - phi(s.x(), s.y() - h, s.z())) / (2.0 * h);
    rep.min_product = std::min(rep.min_product, px * py);
    ++rep.samples;
    if (!(px * py > 0.0)) ++rep.failures;
  }
  return rep;
}

}  // namespace caplab::families
