#include "caplab/ovaloid.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_trigonometric.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <regex>
#include <sstream>

namespace caplab::families {

namespace {

// FFTW planning is not thread-safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

Vec3 azimuth_dir(double phi) { return Vec3(std::cos(phi), std::sin(phi), 0.0); }

}  // namespace

Ovaloid::Ovaloid(std::string name, Profile profile) : name_(std::move(name)), profile_(std::move(profile)) {}

Ovaloid Ovaloid::round_sphere(double radius) {
  if (!(radius > 0.0)) throw GeometryError("round_sphere radius must be positive");
  return Ovaloid("round_sphere", {[radius](double) { return radius; }, [](double) { return 0.0; },
                                  [](double) { return 0.0; }});
}

Ovaloid Ovaloid::prolate(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw GeometryError("prolate semi-axes must be positive");
  const double k = 1.0 / (a * a) - 1.0 / (b * b);
  auto f = [=](double t) { return std::pow(std::sin(t) / a, 2) + std::pow(std::cos(t) / b, 2); };
  Profile p;
  p.rho = [=](double t) { return 1.0 / std::sqrt(f(t)); };
  p.rho_p = [=](double t) { return -0.5 * std::pow(f(t), -1.5) * k * std::sin(2.0 * t); };
  p.rho_pp = [=](double t) {
    const double fv = f(t), f1 = k * std::sin(2.0 * t), f2 = 2.0 * k * std::cos(2.0 * t);
    return 0.75 * std::pow(fv, -2.5) * f1 * f1 - 0.5 * std::pow(fv, -1.5) * f2;
  };
  std::ostringstream name;
  name << "prolate(" << a << "," << b << ")";
  return Ovaloid(name.str(), p);
}

Ovaloid Ovaloid::dumbbell(double depth) {
  if (!(depth >= 0.0 && depth < 1.0)) throw GeometryError("dumbbell depth must lie in [0, 1)");
  Profile p;
  p.rho = [=](double t) { return 1.0 - depth * std::pow(std::sin(t), 2); };
  p.rho_p = [=](double t) { return -depth * std::sin(2.0 * t); };
  p.rho_pp = [=](double t) { return -2.0 * depth * std::cos(2.0 * t); };
  std::ostringstream name;
  name << "dumbbell(" << depth << ")";
  return Ovaloid(name.str(), p);
}

Ovaloid Ovaloid::from_samples(const std::vector<double>& theta, const std::vector<double>& rho) {
  const std::size_t n = theta.size();
  if (n < 5 || rho.size() != n) throw GeometryError("profile needs at least 5 (theta, rho) samples");
  const std::size_t m = n - 1;
  const double h = M_PI / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(theta[k] - k * h) > 1e-9) throw GeometryError("profile samples must be uniform on [0, pi]");
    if (!(rho[k] > 0.0)) throw GeometryError("profile radius must be positive");
  }
  // Even extension rho(2 pi - theta) = rho(theta) over one full period.
  std::vector<double> full(2 * m);
  for (std::size_t k = 0; k < 2 * m; ++k) full[k] = k <= m ? rho[k] : rho[2 * m - k];
  std::shared_ptr<boost::math::interpolators::cardinal_trigonometric<std::vector<double>>> interp;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    interp = std::make_shared<boost::math::interpolators::cardinal_trigonometric<std::vector<double>>>(full, 0.0, h);
  }
  Profile p;
  p.rho = [interp](double t) { return (*interp)(t); };
  p.rho_p = [interp](double t) { return interp->prime(t); };
  p.rho_pp = [interp](double t) { return interp->double_prime(t); };
  return Ovaloid("sampled", p);
}

Ovaloid Ovaloid::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("cannot open profile CSV: " + path);
  std::vector<double> th, rh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b)) {
      if (th.empty()) continue;  // header
      throw GeometryError("profile CSV line " + std::to_string(lineno) + ": expected theta,rho");
    }
    th.push_back(a);
    rh.push_back(b);
  }
  Ovaloid o = from_samples(th, rh);
  o.name_ = "csv:" + path;
  return o;
}

Ovaloid Ovaloid::from_spec(const std::string& spec) {
  static const std::regex call(R"(^\s*([a-z_]+)\s*(?:\(\s*([^)]*)\))?\s*$)");
  if (spec.rfind("csv:", 0) == 0) return from_csv(spec.substr(4));
  std::smatch m;
  if (!std::regex_match(spec, m, call)) throw GeometryError("unrecognized ovaloid profile: " + spec);
  std::vector<double> args;
  std::stringstream ss(m[2].str());
  std::string tok;
  while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
  const std::string fn = m[1].str();
  if (fn == "round_sphere" && args.size() <= 1) return round_sphere(args.empty() ? 1.0 : args[0]);
  if (fn == "prolate" && args.size() == 2) return prolate(args[0], args[1]);
  if (fn == "dumbbell" && args.size() <= 1) return dumbbell(args.empty() ? 0.6 : args[0]);
  throw GeometryError("unrecognized ovaloid profile: " + spec);
}

Vec2 Ovaloid::meridian(double t) const { return rho(t) * Vec2(std::sin(t), std::cos(t)); }

namespace {

struct MeridianDerivs {
  Vec2 t, tp;  // first and second derivatives of (r, z) in theta
};

MeridianDerivs meridian_derivs(const Ovaloid::Profile& p, double th) {
  const double r = p.rho(th), r1 = p.rho_p(th), r2 = p.rho_pp(th);
  const double s = std::sin(th), c = std::cos(th);
  return {Vec2(r1 * s + r * c, r1 * c - r * s), Vec2(r2 * s + 2.0 * r1 * c - r * s, r2 * c - 2.0 * r1 * s - r * c)};
}

}  // namespace

double Ovaloid::gauss_angle(double th) const {
  const auto d = meridian_derivs(profile_, th);
  return std::atan2(-d.t.y(), d.t.x()) + (std::atan2(-d.t.y(), d.t.x()) < -M_PI / 2 ? 2.0 * M_PI : 0.0);
}

double Ovaloid::meridian_curvature(double th) const {
  const auto d = meridian_derivs(profile_, th);
  const double n2 = d.t.squaredNorm();
  return (d.t.y() * d.tp.x() - d.t.x() * d.tp.y()) / (n2 * std::sqrt(n2));
}

double Ovaloid::parallel_curvature(double th) const {
  const double r = rho(th) * std::sin(th);
  if (std::abs(r) < 1e-8) return meridian_curvature(th);
  return std::sin(gauss_angle(th)) / r;
}

Vec3 Ovaloid::point(double th, double phi) const {
  const Vec2 m = meridian(th);
  return m.x() * azimuth_dir(phi) + m.y() * Vec3::UnitZ();
}

Vec3 Ovaloid::outward_normal(double th, double phi) const {
  const double g = gauss_angle(th);
  return std::sin(g) * azimuth_dir(phi) + std::cos(g) * Vec3::UnitZ();
}

double Ovaloid::invert_gauss(double target) const {
  if (!(target >= 0.0 && target <= M_PI)) throw GeometryError("Gauss angle outside [0, pi]");
  double lo = 0.0, hi = M_PI;
  if (target <= gauss_angle(lo)) return lo;
  if (target >= gauss_angle(hi)) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gauss_angle(mid) < target ? lo : hi) = mid;
  }
  double th = 0.5 * (lo + hi);
  // Newton polish: d(gauss)/d(theta) = k_meridian |m'|.
  for (int it = 0; it < 3; ++it) {
    const double slope = meridian_curvature(th) * meridian_derivs(profile_, th).t.norm();
    if (!(slope > 0.0)) break;
    const double next = th - (gauss_angle(th) - target) / slope;
    if (!(next >= lo - 1e-12 && next <= hi + 1e-12)) break;
    th = next;
  }
  if (std::abs(gauss_angle(th) - target) > 1e-10) throw GeometryError("Gauss map inversion did not converge");
  return th;
}

Vec3 Ovaloid::point_with_normal(const Vec3& nu) const {
  const Vec3 n = nu.normalized();
  const double th = invert_gauss(std::acos(std::clamp(n.z(), -1.0, 1.0)));
  const double phi = std::atan2(n.y(), n.x());
  return point(th, phi);
}

geometry::ImplicitSurface Ovaloid::implicit(const Vec3& translation) const {
  const Profile p = profile_;
  auto grad = [p, translation](const Vec3& x) -> Vec3 {
    const Vec3 y = x - translation;
    const double r = y.norm();
    const double rxy = std::hypot(y.x(), y.y());
    const double th = std::atan2(rxy, y.z());
    const Vec3 er = y / r;
    const Vec3 radial = rxy > 0.0 ? Vec3(y.x() / rxy, y.y() / rxy, 0.0) : Vec3::UnitX();
    const Vec3 eth = std::cos(th) * radial - std::sin(th) * Vec3::UnitZ();
    return er - p.rho_p(th) / r * eth;
  };
  geometry::ImplicitSurface s;
  s.value = [p, translation](const Vec3& x) {
    const Vec3 y = x - translation;
    return y.norm() - p.rho(std::atan2(std::hypot(y.x(), y.y()), y.z()));
  };
  s.gradient = grad;
  s.hessian = [grad, translation](const Vec3& x) -> Mat3 {
    const double h = 1e-5 * std::max(1.0, (x - translation).norm());
    Mat3 m;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = h * Vec3::Unit(k);
      m.col(k) = (grad(x + e) - grad(x - e)) / (2.0 * h);
    }
    return 0.5 * (m + m.transpose());
  };
  return s;
}

geometry::ParametricSurface Ovaloid::parametrization(const Vec3& translation) const {
  const Profile p = profile_;
  return geometry::ParametricSurface::analytic([p, translation](double th, double phi) {
    const double r = p.rho(th), r1 = p.rho_p(th), r2 = p.rho_pp(th);
    const double s = std::sin(th), c = std::cos(th);
    const Vec3 d = azimuth_dir(phi), dp(-std::sin(phi), std::cos(phi), 0.0);
    const Vec3 er = s * d + c * Vec3::UnitZ();
    const Vec3 eth = c * d - s * Vec3::UnitZ();
    geometry::SurfaceJet j;
    j.x = translation + r * er;
    j.xu = r1 * er + r * eth;
    j.xv = r * s * dp;
    j.xuu = (r2 - r) * er + 2.0 * r1 * eth;
    j.xuv = (r1 * s + r * c) * dp;
    j.xvv = -r * s * d;
    return j;
  });
}

Ovaloid::Validation Ovaloid::validate(int samples) const {
  Validation v;
  v.gauss_monotone = true;
  v.convex = true;
  v.min_curvature = std::numeric_limits<double>::infinity();
  v.min_gauss_step = std::numeric_limits<double>::infinity();
  double prev = gauss_angle(0.0);
  if (std::abs(prev) > 1e-9) {
    v.gauss_monotone = false;
    v.reason = "outward normal at the north pole is not +z";
  }
  for (int i = 0; i <= samples; ++i) {
    const double th = M_PI * i / samples;
    const double k1 = meridian_curvature(th), k2 = parallel_curvature(th);
    v.min_curvature = std::min({v.min_curvature, k1, k2});
    if (i > 0) {
      const double g = gauss_angle(th);
      v.min_gauss_step = std::min(v.min_gauss_step, g - prev);
      if (!(g > prev)) {
        v.gauss_monotone = false;
        if (v.reason.empty()) v.reason = "Gauss angle not strictly increasing at theta=" + std::to_string(th);
      }
      prev = g;
    }
  }
  if (std::abs(prev - M_PI) > 1e-9 && v.gauss_monotone) {
    v.gauss_monotone = false;
    v.reason = "Gauss angle does not reach pi at the south pole";
  }
  if (!(v.min_curvature > 0.0)) {
    v.convex = false;
    if (v.reason.empty()) v.reason = "profile is not strictly convex";
  }
  return v;
}

}  // namespace caplab::families
