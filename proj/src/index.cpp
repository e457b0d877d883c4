#include "caplab/index.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace caplab::index {

namespace {

double wrap(double a) { return std::remainder(a, 2.0 * M_PI); }

double mod_pi(double a) {
  double r = std::fmod(a, M_PI);
  if (r < 0.0) r += M_PI;
  return r >= M_PI ? r - M_PI : r;
}

// Drops a trailing t = 1 sample after checking that it closes the loop.
std::size_t loop_length(const ClosedCurveFieldTrace& tr) {
  if (tr.t.size() != tr.theta.size()) throw IndexError("trace has mismatched t and theta");
  std::size_t n = tr.theta.size();
  if (n < 3) throw IndexError("trace needs at least three samples");
  if (tr.t.back() == 1.0 && tr.t.front() == 0.0) {
    if (std::abs(wrap(2.0 * (tr.theta.back() - tr.theta.front()))) > 2e-9)
      throw IndexError("trace does not close mod pi");
    --n;
  }
  return n;
}

[[noreturn]] void too_coarse(double step, std::size_t n) {
  const double need = std::ceil(n * std::abs(step) / (0.25 * M_PI));
  throw IndexError("resolution too coarse: doubled-angle step " + std::to_string(std::abs(step)) +
                   " needs at least " + std::to_string(static_cast<long long>(need)) + " samples");
}

}  // namespace

std::vector<double> unwrap_doubled(const ClosedCurveFieldTrace& tr) {
  std::vector<double> out(tr.theta.size());
  if (out.empty()) return out;
  out[0] = 2.0 * tr.theta[0];
  for (std::size_t k = 1; k < out.size(); ++k) {
    const double step = wrap(2.0 * (tr.theta[k] - tr.theta[k - 1]));
    if (!(std::abs(step) < 0.5 * M_PI)) too_coarse(step, out.size());
    out[k] = out[k - 1] + step;
  }
  return out;
}

double arc_variation(const ClosedCurveFieldTrace& tr) {
  const auto lifted = unwrap_doubled(tr);
  return lifted.empty() ? 0.0 : 0.5 * (lifted.back() - lifted.front());
}

double angular_variation(const ClosedCurveFieldTrace& tr) {
  const std::size_t n = loop_length(tr);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double step = wrap(2.0 * (tr.theta[(k + 1) % n] - tr.theta[k]));
    if (!(std::abs(step) < 0.5 * M_PI)) too_coarse(step, n);
    total += step;
  }
  return 0.5 * total;
}

ClosedCurveFieldTrace trace_circle(const DirectionField& field, double cx, double cy, double r, int n) {
  if (n < 3) throw IndexError("circle trace needs at least three samples");
  ClosedCurveFieldTrace tr;
  tr.t.resize(n);
  tr.theta.resize(n);
  for (int k = 0; k < n; ++k) {
    tr.t[k] = double(k) / n;
    const double a = 2.0 * M_PI * tr.t[k];
    tr.theta[k] = field(cx + r * std::cos(a), cy + r * std::sin(a));
    if (!std::isfinite(tr.theta[k])) throw IndexError("field undefined on the index circle");
  }
  return tr;
}

IndexResult index(const DirectionField& field, double cx, double cy, double r, int n) {
  IndexResult res;
  res.variation = angular_variation(trace_circle(field, cx, cy, r, n));
  const double twice = res.variation / M_PI;
  res.index.twice_index = static_cast<int>(std::lround(twice));
  res.residual = 0.5 * std::abs(twice - res.index.twice_index);
  if (!(res.residual < 0.05))
    throw IndexError("index rounding residual " + std::to_string(res.residual) + " too large");
  return res;
}

double model_slope(int n, double theta, Branch branch) {
  const double x = (n - 2) * theta;
  const double c = std::cos(x);
  if (std::abs(c) < 1e-12) throw IndexError("slope has a pole here; use model_angle");
  const double sec = 1.0 / c;
  return -std::tan(x) + (branch == Branch::plus ? sec : -sec);
}

double model_angle(int n, double theta, Branch branch) {
  const double base = branch == Branch::plus ? 0.25 * M_PI : -0.25 * M_PI;
  return mod_pi(base - 0.5 * (n - 2) * theta);
}

DirectionField model_field(int n, Branch branch) {
  return [n, branch](double u, double v) { return model_angle(n, std::atan2(v, u), branch); };
}

Variation model_angular_variation(int n, double theta0, double theta1, Branch branch) {
  Variation out;
  const int m = n - 2;
  out.closed_form = -0.5 * m * (theta1 - theta0);
  if (m == 0 || theta0 == theta1) {
    out.pieces = 1;
    return out;
  }
  const double sgn = branch == Branch::plus ? 1.0 : -1.0;
  // (sgn - s)(sgn + s) = c^2: pick the quotient that avoids cancellation.
  auto integrand = [&](double t) {
    const double x = m * t;
    const double c = std::cos(x), s = std::sin(x);
    double zeta, dzeta;
    if (std::abs(sgn - s) >= std::abs(sgn + s)) {
      zeta = (sgn - s) / c;
      dzeta = m * (sgn * s - 1.0) / (c * c);
    } else {
      zeta = c / (sgn + s);
      dzeta = -m * sgn / (sgn + s);
    }
    return dzeta / (1.0 + zeta * zeta);
  };
  const double lo = std::min(theta0, theta1), hi = std::max(theta0, theta1);
  // Poles of sec(m t) at t = (pi/2 + k pi)/m.
  std::vector<double> cuts{lo};
  const double step = M_PI / std::abs(m);
  for (double p = std::ceil((lo - 0.5 * step) / step) * step + 0.5 * step; p < hi; p += step)
    if (p > lo) cuts.push_back(p);
  cuts.push_back(hi);
  double total = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    // The error estimate has an absolute floor of a few ulp, so short pieces
    // never meet a relative target; a shallow depth bounds the work.
    total += GK::integrate(integrand, cuts[k], cuts[k + 1], 5, 1e-13);
    ++out.pieces;
  }
  out.quadrature = theta1 >= theta0 ? total : -total;
  return out;
}

SeamReport seam_check(const CollarField& f, const std::vector<double>& theta_s, double tol_seam, double h) {
  SeamReport rep;
  rep.tol = tol_seam;
  // One-sided second-order difference of a doubled angle in tau.
  auto d_tau = [h](const DirectionField& L, double s) {
    const double a0 = 2.0 * L(s, 0.0);
    const double a1 = a0 + wrap(2.0 * L(s, h) - a0);
    const double a2 = a1 + wrap(2.0 * L(s, 2.0 * h) - a1);
    return (-3.0 * a0 + 4.0 * a1 - a2) / (2.0 * h);
  };
  for (double s : theta_s) {
    rep.c0_gap = std::max(rep.c0_gap, std::abs(wrap(2.0 * f.L1(s, 0.0) + 2.0 * f.L2(s, 0.0))));
    rep.derivative_gap = std::max(rep.derivative_gap, std::abs(d_tau(f.L1, s) - d_tau(f.L2, s)));
    ++rep.samples;
  }
  return rep;
}

DirectionField double_field(const DoubleSurfaceAtlas&, const CollarField& f, const std::vector<double>& theta_s,
                            double tol_seam) {
  const SeamReport rep = seam_check(f, theta_s, tol_seam);
  if (!rep.pass())
    throw IndexError("capillary alignment violated (seam gap " + std::to_string(std::max(rep.c0_gap,
                                                                                         rep.derivative_gap)) + ")");
  return [f](double s, double tau) { return tau >= 0.0 ? mod_pi(f.L1(s, tau)) : mod_pi(-f.L2(s, -tau)); };
}

std::string verdict(const PoincareHopfReport& r) { return r.consistent() ? "consistent" : "inconsistent"; }

PoincareHopfReport poincare_hopf_audit(const std::vector<IndexedSingularity>& s, int euler_characteristic) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s[i].radius <= 0.0 || s[j].radius <= 0.0) continue;
      if (std::hypot(s[i].u - s[j].u, s[i].v - s[j].v) <= s[i].radius + s[j].radius)
        throw IndexError("overlapping index circles");
    }
  PoincareHopfReport rep;
  rep.euler_characteristic = euler_characteristic;
  for (const auto& p : s) rep.twice_sum += p.index.twice_index;
  return rep;
}

std::complex<double> QuadraticDifferential::operator()(std::complex<double> z) const {
  std::complex<double> q = scale;
  for (const auto& [z0, m] : factors) q *= std::pow(z - z0, m);
  return q;
}

int QuadraticDifferential::degree() const {
  int d = 0;
  for (const auto& f : factors) d += f.second;
  return d;
}

DirectionField QuadraticDifferential::field() const {
  return [q = *this](double u, double v) { return mod_pi(-0.5 * std::arg(q({u, v}))); };
}

DirectionField QuadraticDifferential::field_at_infinity() const {
  return [q = *this](double u, double v) {
    const std::complex<double> w(u, v);
    // dz = -dw / w^2, so q(z) dz^2 = q(1/w) w^-4 dw^2.
    return mod_pi(-0.5 * (std::arg(q(1.0 / w)) - 4.0 * std::arg(w)));
  };
}

std::vector<IndexedSingularity> sphere_field_indices(const QuadraticDifferential& q, int samples) {
  std::vector<IndexedSingularity> out;
  double sep = std::numeric_limits<double>::infinity(), reach = 0.0;
  for (std::size_t i = 0; i < q.factors.size(); ++i) {
    reach = std::max(reach, std::abs(q.factors[i].first));
    for (std::size_t j = i + 1; j < q.factors.size(); ++j)
      sep = std::min(sep, std::abs(q.factors[i].first - q.factors[j].first));
  }
  if (sep == 0.0) throw IndexError("repeated factor location");
  const double r = std::isfinite(sep) ? sep / 3.0 : 0.5;
  const DirectionField f = q.field();
  for (const auto& [z0, m] : q.factors) {
    if (m == 0) continue;
    IndexedSingularity s;
    s.u = z0.real();
    s.v = z0.imag();
    s.radius = r;
    s.index = index(f, s.u, s.v, r, samples).index;
    s.label = (m > 0 ? "zero of order " : "pole of order ") + std::to_string(std::abs(m));
    out.push_back(s);
  }
  if (q.order_at_infinity() != 0) {
    IndexedSingularity s;
    s.index = index(q.field_at_infinity(), 0.0, 0.0, 1.0 / (3.0 * (reach + 1.0)), samples).index;
    s.label = "infinity";
    out.push_back(s);
  }
  return out;
}

}  // namespace caplab::index
