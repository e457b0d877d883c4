#include "caplab/sigma.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>

namespace caplab::sigma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mod_pi(double a) {
  double r = std::fmod(a, M_PI);
  if (r < 0.0) r += M_PI;
  if (r >= M_PI) r -= M_PI;
  return r;
}

double wrap_2pi(double a) { return std::remainder(a, 2.0 * M_PI); }

Vec3 euclidean_normal(const geometry::FundamentalForms& f) { return f.normal.normalized(); }

void require_chart(const ConformalChart& chart, const FamilyKind& family) {
  if (chart.kind() != family.chart().kind())
    throw GeometryError("family " + family.describe() + " does not live in the " + geometry::to_string(chart.kind()) +
                        " chart");
}

}  // namespace

Mat2 sigma_at(const ConformalChart& chart, const ParametricSurface& surface, const FamilyKind& family, double u,
              double v) {
  require_chart(chart, family);
  const geometry::SurfaceJet jet = surface.jet(u, v);
  const geometry::FundamentalForms forms = geometry::fundamental_forms(chart, jet, surface.orientation());
  const families::FamilyMember m = families::member(family, jet.x, euclidean_normal(forms));
  const Vec3* t[2] = {&jet.xu, &jet.xv};
  Mat2 ii;
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) ii(a, b) = ii(b, a) = geometry::implicit_second_form(chart, m.implicit, jet.x, *t[a], *t[b]);
  return forms.second - ii;
}

Mat2 sigma_via_graph(const ConformalChart& chart, const ParametricSurface& surface, const FamilyKind& family,
                     double u, double v, const Vec3& e1) {
  require_chart(chart, family);
  const geometry::SurfaceJet jet = surface.jet(u, v);
  const geometry::FundamentalForms forms = geometry::fundamental_forms(chart, jet, surface.orientation());
  const Vec3 n = euclidean_normal(forms);
  const families::FamilyMember m = families::member(family, jet.x, n);
  const domains::AdaptedChart ac = domains::interior_adapted_chart(chart, jet.x, e1, n);
  const auto g = families::member_graph(m, ac);
  const auto d = g.derivatives(0.0, 0.0);

  const Mat3 basis = ac.jacobian(0.0, 0.0, 0.0);
  const Vec3 a0 = basis.col(0).normalized(), a1 = basis.col(1).normalized();
  const double lam = chart.lambda(jet.x);
  Mat2 ii_adapted;
  ii_adapted << d.huu, d.huv, d.huv, d.hvv;
  const Vec3* e[2] = {&a0, &a1};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) ii_adapted(i, j) += chart.christoffel_contract(jet.x, *e[i], *e[j]).dot(n);
  ii_adapted *= lam;
  Mat2 A;
  A << jet.xu.dot(a0), jet.xu.dot(a1), jet.xv.dot(a0), jet.xv.dot(a1);
  return forms.second - A * ii_adapted * A.transpose();
}

DirectionPair asymptotic_directions(const Mat2& s, const Mat2& first, double tol_sing) {
  if (!(s.norm() >= tol_sing) || s.norm() == 0.0)
    throw SigmaError(SigmaError::Kind::singular, "sigma vanishes here (singular point)");
  const double det = s.determinant() / first.determinant();
  const double scale = (first.inverse() * s).squaredNorm();
  if (!(det < -1e-14 * scale)) throw SigmaError(SigmaError::Kind::signature, "sigma is not Lorentzian here");
  // A cos^2 + 2B cos sin + C sin^2 = (A+C)/2 + R cos(2t - phi0).
  const double A = s(0, 0), B = 0.5 * (s(0, 1) + s(1, 0)), C = s(1, 1);
  const double R = std::hypot(0.5 * (A - C), B);
  const double phi0 = std::atan2(B, 0.5 * (A - C));
  const double beta = std::acos(std::clamp(-0.5 * (A + C) / R, -1.0, 1.0));
  return {mod_pi(0.5 * (phi0 + beta)), mod_pi(0.5 * (phi0 - beta))};
}

DirectionPair principal_directions(const Mat2& s, const Mat2& first) {
  if (s.norm() == 0.0) throw SigmaError(SigmaError::Kind::singular, "principal directions of a zero form");
  const Eigen::GeneralizedSelfAdjointEigenSolver<Mat2> es(0.5 * (s + s.transpose()), first);
  const Vec2 big = es.eigenvectors().col(1), small = es.eigenvectors().col(0);
  return {mod_pi(std::atan2(big(1), big(0))), mod_pi(std::atan2(small(1), small(0)))};
}

double metric_line_angle(double a, double b, const Mat2& first) {
  const Vec2 da(std::cos(a), std::sin(a)), db(std::cos(b), std::sin(b));
  const double c = std::abs(da.dot(first * db)) / std::sqrt(da.dot(first * da) * db.dot(first * db));
  const double s = std::sqrt(std::max(0.0, first.determinant())) * std::abs(da(0) * db(1) - da(1) * db(0)) /
                   std::sqrt(da.dot(first * da) * db.dot(first * db));
  return std::atan2(s, c);
}

std::string to_string(HarmonicJet::Status s) {
  switch (s) {
    case HarmonicJet::Status::ok: return "ok";
    case HarmonicJet::Status::zero: return "zero to order N";
    case HarmonicJet::Status::mismatch: return "model mismatch";
  }
  return "?";
}

HarmonicJet leading_harmonic_jet(const std::function<double(double, double)>& d, const JetOptions& opt) {
  using C = std::complex<double>;
  const int N = opt.max_order;
  const std::array<double, 3> radii = {2.0 * opt.rho0, opt.rho0, 0.5 * opt.rho0};
  std::array<std::vector<C>, 3> c;
  std::array<double, 3> peak{};
  for (int r = 0; r < 3; ++r) {
    std::vector<double> samples(opt.samples);
    for (int j = 0; j < opt.samples; ++j) {
      const double t = 2.0 * M_PI * j / opt.samples;
      samples[j] = d(radii[r] * std::cos(t), radii[r] * std::sin(t));
    }
    c[r].assign(N + 1, C(0.0));
    for (int k = 0; k <= N; ++k) {
      C acc = 0.0;
      for (int j = 0; j < opt.samples; ++j)
        acc += samples[j] * std::polar(1.0, -k * 2.0 * M_PI * j / opt.samples);
      c[r][k] = acc * (2.0 / opt.samples);
      peak[r] = std::max(peak[r], std::abs(c[r][k]));
    }
  }
  HarmonicJet jet;
  if (peak[1] == 0.0 && peak[2] == 0.0) {
    jet.message = "difference vanishes on every circle";
    return jet;
  }
  // Decay order of each frequency between the two smallest radii.
  std::vector<double> order(N + 1, std::numeric_limits<double>::infinity());
  for (int k = 0; k <= N; ++k) {
    const double a = std::abs(c[1][k]), b = std::abs(c[2][k]);
    if (a > 1e-9 * peak[1] && b > 1e-9 * peak[2]) order[k] = std::log2(a / b);
  }
  const double lead = *std::min_element(order.begin(), order.end());
  if (!std::isfinite(lead) || lead > N + 0.5) {
    jet.message = "no harmonic term up to order " + std::to_string(N);
    return jet;
  }
  const int D = static_cast<int>(std::lround(lead));
  jet.n = D;
  if (D < 2) {
    jet.status = HarmonicJet::Status::mismatch;
    jet.message = "difference is not tangent at the origin";
    return jet;
  }
  for (int k = 0; k <= N; ++k) {
    if (k != D && order[k] < D + 0.5) {
      jet.status = HarmonicJet::Status::mismatch;
      jet.message = "frequency " + std::to_string(k) + " appears at leading order " + std::to_string(D);
      return jet;
    }
  }
  if (D > N || std::abs(order[D] - D) > 0.25) {
    jet.status = HarmonicJet::Status::mismatch;
    jet.message = "leading frequency " + std::to_string(D) + " decays at order " + std::to_string(order[D]);
    return jet;
  }
  const C a1 = c[1][D] / std::pow(radii[1], D), a2 = c[2][D] / std::pow(radii[2], D);
  jet.alpha = (4.0 * a2 - a1) / 3.0;
  jet.residual = std::abs(a1 - a2) / std::abs(jet.alpha);
  jet.status = HarmonicJet::Status::ok;
  return jet;
}

Mat2 harmonic_hessian(int n, std::complex<double> alpha, double u, double v) {
  if (n < 2) return Mat2::Zero();
  const std::complex<double> w = alpha * double(n * (n - 1)) * std::pow(std::complex<double>(u, v), n - 2);
  Mat2 h;
  h << w.real(), -w.imag(), -w.imag(), -w.real();
  return h;
}

bool ModelConsistency::decreasing() const {
  if (vacuous) return true;
  for (std::size_t i = 1; i < residuals.size(); ++i)
    if (!(residuals[i] < residuals[i - 1])) return false;
  return residuals.size() >= 2;
}

double ModelConsistency::last_ratio() const {
  if (residuals.size() < 2) return kNaN;
  return residuals.back() / residuals[residuals.size() - 2];
}

ModelConsistency sigma_model_consistency(const std::function<Mat2(double, double)>& sigma_fn, const HarmonicJet& jet,
                                         double c, const std::vector<double>& radii, int samples) {
  ModelConsistency mc;
  mc.radii = radii;
  if (jet.status != HarmonicJet::Status::ok) {
    mc.vacuous = true;
    return mc;
  }
  for (double rho : radii) {
    double worst = 0.0;
    for (int j = 0; j < samples; ++j) {
      const double t = 2.0 * M_PI * j / samples;
      const double u = rho * std::cos(t), v = rho * std::sin(t);
      worst = std::max(worst, (sigma_fn(u, v) - c * harmonic_hessian(jet.n, jet.alpha, u, v)).norm());
    }
    mc.residuals.push_back(worst / std::pow(rho, jet.n - 2));
  }
  return mc;
}

Mat2 normalize_by_first_form(const Mat2& s, const Mat2& first0) {
  const Eigen::SelfAdjointEigenSolver<Mat2> es(first0);
  const Mat2 w = es.operatorInverseSqrt();
  return w * s * w;
}

std::string to_string(BoundaryAngleReport::Status s) {
  switch (s) {
    case BoundaryAngleReport::Status::checked: return "checked";
    case BoundaryAngleReport::Status::member_point: return "member point";
    case BoundaryAngleReport::Status::not_transversal: return "not transversal";
  }
  return "?";
}

BoundaryAngleReport boundary_angle_audit(const domains::Domain& domain, const geometry::ImplicitSurface& surface,
                                         const FamilyKind& family, const Vec3& p, double tol_sing) {
  require_chart(domain.chart(), family);
  BoundaryAngleReport rep;
  const Vec3 ns = surface.unit_normal(p);
  const Vec3 nb = domain.outward_unit(p);
  const Vec3 tangent = ns.cross(nb);
  if (tangent.norm() < 1e-8) {
    rep.status = BoundaryAngleReport::Status::not_transversal;
    return rep;
  }
  const auto bc = domains::boundary_adapted_chart(domain, p, tangent.normalized());
  const auto h = domains::graph_in_chart(surface, bc.chart, 0.05, 1e-3);
  const auto m = families::member(family, p, ns);
  const auto ht = families::member_graph(m, bc.chart, 0.05, 1e-3);
  const auto d = h.refined_derivatives(0.0, 0.0), dt = ht.refined_derivatives(0.0, 0.0);
  rep.h_u = d.hu;
  rep.mixed = std::abs(d.huv - dt.huv);
  rep.scale = std::max({std::abs(d.huu - dt.huu), std::abs(d.hvv - dt.hvv), rep.mixed});

  const ConformalChart& chart = domain.chart();
  const Mat3 J = bc.chart.jacobian(0.0, 0.0, 0.0);
  const Vec3 xu = J.col(0) + d.hu * J.col(2), xv = J.col(1) + d.hv * J.col(2);
  const Vec3* t[2] = {&xu, &xv};
  Mat2 s, first;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      s(a, b) = geometry::implicit_second_form(chart, surface, p, *t[a], *t[b]) -
                geometry::implicit_second_form(chart, m.implicit, p, *t[a], *t[b]);
      first(a, b) = chart.inner(p, *t[a], *t[b]);
    }
  rep.sigma_norm = s.norm();
  if (rep.sigma_norm < tol_sing) {
    rep.status = BoundaryAngleReport::Status::member_point;
    return rep;
  }
  const DirectionPair pd = principal_directions(s, first);
  rep.misalignment = std::min(metric_line_angle(pd.first, M_PI / 2.0, first),
                              metric_line_angle(pd.second, M_PI / 2.0, first));
  return rep;
}

namespace {

SigmaGrid finish_grid(SigmaGrid g, double rel_tol, double abs_floor) {
  const int n = static_cast<int>(g.sigma.size());
  g.max_norm = 0.0;
  g.min_norm = std::numeric_limits<double>::infinity();
  for (const Mat2& s : g.sigma) {
    g.max_norm = std::max(g.max_norm, s.norm());
    g.min_norm = std::min(g.min_norm, s.norm());
  }
  g.tol_sing = std::max(rel_tol * g.max_norm, abs_floor);
  g.theta1.assign(n, kNaN);
  g.theta2.assign(n, kNaN);
  g.singular.assign(n, 0);
  g.lorentz_violations = 0;
  for (int k = 0; k < n; ++k) {
    if (g.sigma[k].norm() < g.tol_sing) {
      g.singular[k] = 1;
      continue;
    }
    try {
      const DirectionPair dp = asymptotic_directions(g.sigma[k], g.first[k], g.tol_sing);
      g.theta1[k] = dp.first;
      g.theta2[k] = dp.second;
    } catch (const SigmaError&) {
      ++g.lorentz_violations;
    }
  }
  return g;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

}  // namespace

SigmaGrid sample_sigma_grid(const ConformalChart& chart, const ParametricSurface& surface, const FamilyKind& family,
                            const surfaces::ParamRect& rect, int nu, int nv, double rel_tol, double abs_floor) {
  return sample_sigma_grid(
      [&](double u, double v) {
        return std::make_pair(sigma_at(chart, surface, family, u, v),
                              geometry::fundamental_forms(chart, surface, u, v).first);
      },
      rect, nu, nv, rel_tol, abs_floor);
}

SigmaGrid sample_sigma_grid(const std::function<std::pair<Mat2, Mat2>(double, double)>& fields,
                            const surfaces::ParamRect& rect, int nu, int nv, double rel_tol, double abs_floor) {
  SigmaGrid g;
  g.us = linspace(rect.u0, rect.u1, nu);
  g.vs = linspace(rect.v0, rect.v1, nv);
  g.sigma.resize(nu * nv);
  g.first.resize(nu * nv);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const auto [s, f] = fields(g.us[i], g.vs[j]);
      g.sigma[g.at(i, j)] = s;
      g.first[g.at(i, j)] = f;
    }
  return finish_grid(std::move(g), rel_tol, abs_floor);
}

namespace {

// Winding of the doubled L1 angle along a closed lattice loop, as twice the
// index; nullopt if the loop touches an undefined direction.
std::optional<int> loop_twice_index(const SigmaGrid& g, const std::vector<std::pair<int, int>>& loop) {
  double total = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const auto [i0, j0] = loop[k];
    const auto [i1, j1] = loop[(k + 1) % loop.size()];
    const double a = g.theta1[g.at(i0, j0)], b = g.theta1[g.at(i1, j1)];
    if (!std::isfinite(a) || !std::isfinite(b)) return std::nullopt;
    total += wrap_2pi(2.0 * (b - a));
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

std::vector<std::pair<int, int>> ring(int i0, int j0, int i1, int j1) {
  std::vector<std::pair<int, int>> loop;
  for (int i = i0; i < i1; ++i) loop.emplace_back(i, j0);
  for (int j = j0; j < j1; ++j) loop.emplace_back(i1, j);
  for (int i = i1; i > i0; --i) loop.emplace_back(i, j1);
  for (int j = j1; j > j0; --j) loop.emplace_back(i0, j);
  return loop;
}

}  // namespace

SingularityReport sigma_singularities(const SigmaGrid& g, int isolation_cells) {
  SingularityReport rep;
  const int nu = g.nu(), nv = g.nv();
  std::vector<int> label(nu * nv, -1);
  struct Box {
    int i0, j0, i1, j1;
  };
  std::vector<Box> boxes;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      if (!g.singular[g.at(i, j)] || label[g.at(i, j)] >= 0) continue;
      const int id = static_cast<int>(boxes.size());
      Box b{i, j, i, j};
      double su = 0.0, sv = 0.0;
      int count = 0;
      std::queue<std::pair<int, int>> q;
      q.emplace(i, j);
      label[g.at(i, j)] = id;
      while (!q.empty()) {
        const auto [a, c] = q.front();
        q.pop();
        su += g.us[a];
        sv += g.vs[c];
        ++count;
        b = {std::min(b.i0, a), std::min(b.j0, c), std::max(b.i1, a), std::max(b.j1, c)};
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int x = a + di[k], y = c + dj[k];
          if (x < 0 || y < 0 || x >= nu || y >= nv) continue;
          if (!g.singular[g.at(x, y)] || label[g.at(x, y)] >= 0) continue;
          label[g.at(x, y)] = id;
          q.emplace(x, y);
        }
      }
      boxes.push_back(b);
      Singularity s;
      s.u = su / count;
      s.v = sv / count;
      s.cells = count;
      if (b.i1 - b.i0 > isolation_cells || b.j1 - b.j0 > isolation_cells) {
        rep.non_isolated = true;
        rep.message = "non-isolated zero set";
      } else if (b.i0 >= 2 && b.j0 >= 2 && b.i1 + 2 < nu && b.j1 + 2 < nv) {
        const auto ti = loop_twice_index(g, ring(b.i0 - 2, b.j0 - 2, b.i1 + 2, b.j1 + 2));
        if (ti) {
          s.twice_index = *ti;
          s.n = 2 - *ti;
        }
      }
      rep.points.push_back(s);
    }
  if (rep.non_isolated) return rep;

  // Zeros that fall between lattice nodes. A four-node loop cannot resolve
  // a doubled-angle turn of 2 pi or more, so flagged cells are grouped and
  // the index is read off a wider ring around each group.
  const int ncu = nu - 1, ncv = nv - 1;
  std::vector<char> flagged(std::max(ncu, 0) * std::max(ncv, 0), 0);
  for (int i = 0; i < ncu; ++i)
    for (int j = 0; j < ncv; ++j) {
      bool near_cluster = false;
      for (const Box& b : boxes)
        near_cluster |= i >= b.i0 - 2 && i <= b.i1 + 2 && j >= b.j0 - 2 && j <= b.j1 + 2;
      if (near_cluster) continue;
      const auto ti = loop_twice_index(g, ring(i, j, i + 1, j + 1));
      flagged[i * ncv + j] = ti && *ti != 0;
    }
  std::vector<char> seen(flagged.size(), 0);
  for (int i = 0; i < ncu; ++i)
    for (int j = 0; j < ncv; ++j) {
      if (!flagged[i * ncv + j] || seen[i * ncv + j]) continue;
      Box b{i, j, i + 1, j + 1};
      double su = 0.0, sv = 0.0;
      int count = 0, twice = 0;
      std::queue<std::pair<int, int>> q;
      q.emplace(i, j);
      seen[i * ncv + j] = 1;
      while (!q.empty()) {
        const auto [a, c] = q.front();
        q.pop();
        su += 0.5 * (g.us[a] + g.us[a + 1]);
        sv += 0.5 * (g.vs[c] + g.vs[c + 1]);
        twice += *loop_twice_index(g, ring(a, c, a + 1, c + 1));
        ++count;
        b = {std::min(b.i0, a), std::min(b.j0, c), std::max(b.i1, a + 1), std::max(b.j1, c + 1)};
        for (int x = a - 1; x <= a + 1; ++x)
          for (int y = c - 1; y <= c + 1; ++y) {
            if (x < 0 || y < 0 || x >= ncu || y >= ncv) continue;
            if (!flagged[x * ncv + y] || seen[x * ncv + y]) continue;
            seen[x * ncv + y] = 1;
            q.emplace(x, y);
          }
      }
      if (b.i0 >= 2 && b.j0 >= 2 && b.i1 + 2 < nu && b.j1 + 2 < nv)
        if (const auto ti = loop_twice_index(g, ring(b.i0 - 2, b.j0 - 2, b.i1 + 2, b.j1 + 2))) twice = *ti;
      if (twice == 0) continue;
      Singularity s;
      s.u = su / count;
      s.v = sv / count;
      s.twice_index = twice;
      s.n = 2 - twice;
      rep.points.push_back(s);
    }
  return rep;
}

void write_sigma_csv(const SigmaGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "u,v,sigma11,sigma12,sigma22,theta_L1,theta_L2,singular_flag\n";
  char buf[512];
  for (int i = 0; i < g.nu(); ++i)
    for (int j = 0; j < g.nv(); ++j) {
      const int k = g.at(i, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", g.us[i], g.vs[j],
                    g.sigma[k](0, 0), g.sigma[k](0, 1), g.sigma[k](1, 1), g.theta1[k], g.theta2[k],
                    static_cast<int>(g.singular[k]));
      out << buf;
    }
}

}  // namespace caplab::sigma
