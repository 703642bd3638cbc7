#ifndef SPHEREFORGE_SA3_ORACLE_HPP
#define SPHEREFORGE_SA3_ORACLE_HPP

#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include <Eigen/Dense>

#include "sphereforge/versality.hpp"

// Floating-point S_A3 oracle: damped Newton on the defining system of the
// distance-squared family, independent of the exact formulas.
namespace sftest {

using namespace sphereforge;

struct DPoly {
  std::map<std::pair<int, int>, double> c;
  // d^p/dx^p d^q/dy^q at (x, y)
  double d(int p, int r, double x, double y) const
  {
    double s = 0;
    for (auto& [ij, v] : c) {
      auto [i, j] = ij;
      if (i < p || j < r) continue;
      double f = v;
      for (int k = 0; k < p; ++k) f *= i - k;
      for (int k = 0; k < r; ++k) f *= j - k;
      s += f * std::pow(x, i - p) * std::pow(y, j - r);
    }
    return s;
  }
};

struct NumericFamily {
  DPoly h0;
  std::map<int, DPoly> beta;  // by power of s
  double r0, r1;  // r(s) = r0 - r1 s

  // Partial derivatives of h_s.
  double h(int p, int r, double x, double y, double s) const
  {
    double v = h0.d(p, r, x, y);
    for (auto& [k, b] : beta) v += std::pow(s, k + 1) * b.d(p, r, x, y);
    return v;
  }

  // Taylor data of F = (x-a)^2 + (y-b)^2 + (h-c)^2 - r(s) in (x, y).
  struct Derivs {
    double F, Fx, Fy, Fxx, Fxy, Fyy, Fxxx, Fxxy, Fxyy, Fyyy;
  };
  Derivs derivs(double x, double y, double a, double b, double c, double s) const
  {
    double H = h(0, 0, x, y, s) - c;
    double hx = h(1, 0, x, y, s), hy = h(0, 1, x, y, s);
    double hxx = h(2, 0, x, y, s), hxy = h(1, 1, x, y, s), hyy = h(0, 2, x, y, s);
    double hxxx = h(3, 0, x, y, s), hxxy = h(2, 1, x, y, s), hxyy = h(1, 2, x, y, s), hyyy = h(0, 3, x, y, s);
    Derivs o;
    o.F = (x - a) * (x - a) + (y - b) * (y - b) + H * H - (r0 - r1 * s);
    o.Fx = 2 * (x - a) + 2 * H * hx;
    o.Fy = 2 * (y - b) + 2 * H * hy;
    o.Fxx = 2 + 2 * hx * hx + 2 * H * hxx;
    o.Fxy = 2 * hx * hy + 2 * H * hxy;
    o.Fyy = 2 + 2 * hy * hy + 2 * H * hyy;
    o.Fxxx = 6 * hx * hxx + 2 * H * hxxx;
    o.Fxxy = 4 * hx * hxy + 2 * hy * hxx + 2 * H * hxxy;
    o.Fxyy = 4 * hy * hxy + 2 * hx * hyy + 2 * H * hxyy;
    o.Fyyy = 6 * hy * hyy + 2 * H * hyyy;
    return o;
  }

  static double eq4(const Derivs& d) { return d.Fxx * d.Fyy - d.Fxy * d.Fxy; }
  // The cubic Taylor part vanishes on the kernel (Fxy, -Fxx) of the quadratic part.
  static double eq5(const Derivs& d)
  {
    return d.Fxxx * std::pow(d.Fxy, 3) - 3 * d.Fxxy * d.Fxx * d.Fxy * d.Fxy + 3 * d.Fxyy * d.Fxx * d.Fxx * d.Fxy -
           d.Fyyy * std::pow(d.Fxx, 3);
  }

  // Solves the gradient and Hessian-determinant equations for q = (a, b, c) by
  // damped Newton, then returns the remaining two equations.
  Eigen::Vector2d reduced(double x, double y, double s, Eigen::Vector3d& q) const
  {
    auto G = [&](const Eigen::Vector3d& v) {
      Derivs d = derivs(x, y, v(0), v(1), v(2), s);
      return Eigen::Vector3d(d.Fx, d.Fy, eq4(d));
    };
    for (int it = 0; it < 60; ++it) {
      Eigen::Vector3d g = G(q);
      if (g.norm() < 1e-15) break;
      Eigen::Matrix3d J;
      for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(k) = 1e-7;
        J.col(k) = (G(q + e) - G(q - e)) / 2e-7;
      }
      Eigen::Vector3d step = J.fullPivLu().solve(-g);
      double t = 1;
      while (t > 1e-4 && G(q + t * step).norm() > (1 - 0.25 * t) * g.norm()) t /= 2;
      q += t * step;
    }
    Derivs d = derivs(x, y, q(0), q(1), q(2), s);
    return {d.F, eq5(d)};
  }
};

inline NumericFamily numeric(const MongeFamily& m, double c0)
{
  NumericFamily n;
  for (auto& [ij, v] : m.a) n.h0.c[ij] = to_double(v);
  for (auto& [ijk, v] : m.beta) n.beta[std::get<2>(ijk)].c[{std::get<0>(ijk), std::get<1>(ijk)}] = to_double(v);
  n.r0 = c0 * c0;
  n.r1 = to_double(m.r1);
  return n;
}

// Sine of the angle between two plane vectors.
inline double misalignment(const Eigen::Vector2d& u, const Eigen::Vector2d& v)
{
  return std::abs(u(0) * v(1) - u(1) * v(0)) / (u.norm() * v.norm());
}

inline Rational q(long n, long d = 1) { return Rational(n, d); }

inline MongeFamily a4_instance()
{
  MongeFamily m;
  m.a[{2, 0}] = 1;
  m.a[{0, 2}] = q(1, 2);
  m.a[{0, 4}] = q(1, 8);
  m.a[{0, 5}] = 1;
  m.a[{1, 3}] = 1;
  m.r1 = 1;
  return m;
}

inline MongeFamily nontransverse_a3()
{
  MongeFamily m;
  m.a[{2, 0}] = 1;
  m.a[{0, 2}] = q(1, 2);
  m.r1 = 1;
  return m;
}

inline Rational rnd(std::mt19937& rng, int span = 5)
{
  std::uniform_int_distribution<int> num(-span, span), den(1, 4);
  return Rational(num(rng), den(rng));
}

// Random normalized family sitting on the A4 stratum: a04 solves the second
// condition, a05 is redrawn until the third one holds.
inline MongeFamily random_a4(std::mt19937& rng)
{
  MongeFamily m;
  Rational a20, a02;
  do {
    a20 = rnd(rng);
    a02 = rnd(rng);
  } while (a02 == 0 || a02 == a20);
  Rational d = a02 - a20;
  m.a[{2, 0}] = a20;
  m.a[{0, 2}] = a02;
  for (auto ij : {std::pair{1, 2}, {2, 1}, {1, 3}, {2, 2}, {3, 0}})
    if (Rational v = rnd(rng, 2); v != 0) m.a[ij] = v;
  Rational a12 = m.A(1, 2);
  m.a[{0, 4}] = a02 * a02 * a02 - a12 * a12 / (4 * d);
  if (m.A(0, 4) == 0) m.a.erase({0, 4});
  for (;;) {
    Rational a05 = rnd(rng);
    Rational e3 = 4 * d * d * a05 + a12 * (m.A(2, 1) * a12 + 2 * m.A(1, 3) * a02 - 2 * m.A(1, 3) * a20);
    if (e3 != 0) {
      if (a05 != 0) m.a[{0, 5}] = a05;
      break;
    }
  }
  m.r1 = rnd(rng, 2);
  for (auto ijk : {std::tuple{0, 1, 0}, {0, 2, 0}, {0, 3, 0}, {1, 1, 0}, {1, 0, 0}})
    if (Rational v = rnd(rng, 2); v != 0) m.beta[ijk] = v;
  return m;
}

// Moves beta_020 so that the A4 versality expression vanishes, when the
// expression depends on it.
inline void force_zero_expression(MongeFamily& m)
{
  Rational a02 = m.A(0, 2), a12 = m.A(1, 2), d = a02 - m.A(2, 0);
  Rational w = a12 * m.A(2, 1) + m.A(1, 3) * d;
  if (w == 0) return;
  Rational rest = 4 * a02 * a02 * a02 * w * m.r1 - 4 * a02 * a02 * a12 * d * m.B(0, 1, 0) + a12 * a12 * m.B(1, 1, 0) +
                  2 * a12 * d * m.B(0, 3, 0);
  Rational b020 = rest / (2 * w);
  m.beta.erase({0, 2, 0});
  if (b020 != 0) m.beta[{0, 2, 0}] = b020;
}

}  // namespace sftest

#endif  // SPHEREFORGE_SA3_ORACLE_HPP
