#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the code path it is used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "caplab/geometry.hpp"

namespace oracle {

using caplab::Mat2;
using caplab::Mat3;
using caplab::Vec2;
using caplab::Vec3;
using caplab::Vec4;

/// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij) from central
/// differences of the metric matrix.
inline std::array<Mat3, 3> christoffel_from_metric(const std::function<Mat3(const Vec3&)>& metric, const Vec3& x,
                                                   double h = 1e-5) {
  std::array<Mat3, 3> dg;  // dg[l] = d_l g
  for (int l = 0; l < 3; ++l) {
    Vec3 e = Vec3::Zero();
    e(l) = h;
    dg[l] = (metric(x + e) - metric(x - e)) / (2.0 * h);
  }
  const Mat3 ginv = metric(x).inverse();
  std::array<Mat3, 3> gamma;
  for (int k = 0; k < 3; ++k) {
    gamma[k].setZero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l)
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  }
  return gamma;
}

/// II of the Euclidean graph z = h(u, v) with upward normal.
inline Mat2 graph_second_form(const Vec2& grad, const Mat2& hess) {
  return hess / std::sqrt(1.0 + grad.squaredNorm());
}

/// Trapezoid Fourier coefficient (1/pi) \oint f(rho e^{it}) e^{-ikt} dt.
inline std::complex<double> fourier(const std::function<double(double, double)>& f, double rho, int k, int m = 512) {
  std::complex<double> acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * M_PI * i / m;
    acc += f(rho * std::cos(t), rho * std::sin(t)) * std::exp(std::complex<double>(0.0, -k * t));
  }
  return acc * (2.0 / m);
}

/// Doubled-angle winding of a line field around a circle, summing wrapped
/// increments of 2 theta on a very fine sampling.
inline double brute_force_winding(const std::function<double(double, double)>& theta, double cx, double cy,
                                  double r, int m = 20000) {
  double total = 0.0;
  double prev = 2.0 * theta(cx + r, cy);
  for (int i = 1; i <= m; ++i) {
    const double t = 2.0 * M_PI * i / m;
    const double cur = 2.0 * theta(cx + r * std::cos(t), cy + r * std::sin(t));
    total += std::remainder(cur - prev, 2.0 * M_PI);
    prev = cur;
  }
  return total / 2.0;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

// Boundary circles of an equator in S^3 minus two caps, counted by
// sampling the equator as a round S^2 and testing cap membership.
inline int monte_carlo_circles(const Vec4& a, double r, int n = 10000) {
  // Orthonormal basis of a^perp.
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.col(0) = a;
  Eigen::HouseholderQR<Eigen::Matrix4d> qr(m);
  const Eigen::Matrix4d q = qr.householderQ();
  const Vec4 b1 = q.col(1), b2 = q.col(2), b3 = q.col(3);
  // Cap condition |<X, e4>| > cos r in coordinates of the equator.
  const Vec4 pole = Vec4::UnitW();
  const Vec3 w(b1.dot(pole), b2.dot(pole), b3.dot(pole));
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  int north = 0, south = 0;
  const double c = std::cos(r);
  for (int i = 0; i < n; ++i) {
    const Vec3 y = Vec3(g(rng), g(rng), g(rng)).normalized();
    const double h = y.dot(w);
    if (h > c) ++north;
    if (h < -c) ++south;
  }
  return (north > 0 ? 1 : 0) + (south > 0 ? 1 : 0);
}

}  // namespace oracle
