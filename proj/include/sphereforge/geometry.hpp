#ifndef SPHEREFORGE_GEOMETRY_HPP
#define SPHEREFORGE_GEOMETRY_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sphereforge/fields.hpp"

namespace sphereforge {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Fourth-order centered differences on a per-node field; nodes closer than
/// two cells to the boundary or next to invalid nodes have no stencil.
template <typename T>
class Stencil {
 public:
  Stencil(const DomainGrid& g, const std::vector<T>& v, const std::vector<char>& ok) : g_(g), v_(v), ok_(ok) {}

  bool available(int i, int j) const
  {
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        if (!ok_at(i + a, j + b)) return false;
    return true;
  }
  T dx(int i, int j) const { return d1(i, j, 1, 0) / g_.hx(); }
  T dy(int i, int j) const { return d1(i, j, 0, 1) / g_.hy(); }
  T dxx(int i, int j) const { return d2(i, j, 1, 0) / (g_.hx() * g_.hx()); }
  T dyy(int i, int j) const { return d2(i, j, 0, 1) / (g_.hy() * g_.hy()); }
  T dxy(int i, int j) const
  {
    static constexpr double w[5] = {1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12};
    T acc = at(i, j) * 0.0;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        if (a != 0 && b != 0) acc += w[a + 2] * w[b + 2] * at(i + a, j + b);
    return acc / (g_.hx() * g_.hy());
  }

 private:
  bool ok_at(int i, int j) const
  {
    return i >= 0 && j >= 0 && i < g_.nx && j < g_.ny && ok_[g_.index(i, j)];
  }
  const T& at(int i, int j) const { return v_[g_.index(i, j)]; }
  T d1(int i, int j, int di, int dj) const
  {
    return (-at(i + 2 * di, j + 2 * dj) + 8.0 * at(i + di, j + dj) - 8.0 * at(i - di, j - dj) + at(i - 2 * di, j - 2 * dj)) /
           12.0;
  }
  T d2(int i, int j, int di, int dj) const
  {
    return (-at(i + 2 * di, j + 2 * dj) + 16.0 * at(i + di, j + dj) - 30.0 * at(i, j) + 16.0 * at(i - di, j - dj) -
            at(i - 2 * di, j - 2 * dj)) /
           12.0;
  }
  const DomainGrid& g_;
  const std::vector<T>& v_;
  const std::vector<char>& ok_;
};

/// max over interior nodes of |N x Lap N| with the 5-point Laplacian.
inline double harmonicity_residual(const DomainGrid& g, const std::vector<Vec3>& N, const std::vector<char>& ok)
{
  double res = 0;
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      std::size_t c = g.index(i, j), l = g.index(i - 1, j), r = g.index(i + 1, j), d = g.index(i, j - 1),
                  u = g.index(i, j + 1);
      if (!ok[c] || !ok[l] || !ok[r] || !ok[d] || !ok[u]) continue;
      Vec3 lap = (N[l] + N[r] - 2.0 * N[c]) * ihx2 + (N[d] + N[u] - 2.0 * N[c]) * ihy2;
      res = std::max(res, N[c].cross(lap).norm());
    }
  return res;
}

inline double harmonicity_residual(const SurfaceFields& s) { return harmonicity_residual(s.grid, s.N, s.valid); }

/// K = det II / det I from finite differences of f, with normal N. NaN where
/// no stencil exists or |mu| <= mu_fraction * max|mu|.
inline std::vector<double> gauss_curvature(const SurfaceFields& s, double mu_fraction = 0.1)
{
  const DomainGrid& g = s.grid;
  std::vector<char> ok(g.size());
  double mu_max = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    ok[k] = s.valid[k] && std::isfinite(s.f[k](0));
    if (ok[k]) mu_max = std::max(mu_max, std::abs(s.mu[k]));
  }
  Stencil<Vec3> st(g, s.f, ok);
  std::vector<double> K(g.size(), kNaN);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.index(i, j);
      if (!st.available(i, j) || std::abs(s.mu[k]) <= mu_fraction * mu_max) continue;
      Vec3 fx = st.dx(i, j), fy = st.dy(i, j);
      const Vec3& n = s.N[k];
      double E = fx.dot(fx), F = fx.dot(fy), G = fy.dot(fy);
      double L = st.dxx(i, j).dot(n), M = st.dxy(i, j).dot(n), Nn = st.dyy(i, j).dot(n);
      K[k] = (L * Nn - M * M) / (E * G - F * F);
    }
  return K;
}

struct CmcCompanion {
  int delta = 1;
  std::vector<Vec3> g;
  std::vector<double> area;  // |g_x x g_y| (analytic derivatives)
  std::vector<double> H;     // mean curvature by finite differences, NaN where excluded
  double degenerate_fraction = 0;
};

class CompanionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parallel surface g = f + delta N with delta chosen to keep |g_x x g_y| largest
/// in the worst node.
inline CmcCompanion cmc_companion(const SurfaceFields& s, double area_fraction = 0.1, double degenerate_tol = 1e-3)
{
  const DomainGrid& gr = s.grid;
  std::vector<char> ok(gr.size());
  for (std::size_t k = 0; k < gr.size(); ++k) ok[k] = s.valid[k] && std::isfinite(s.f[k](0));
  struct Choice {
    int delta;
    double worst, frac;
    std::vector<double> area;
  };
  std::vector<Choice> choices;
  for (int delta : {1, -1}) {
    Choice c{delta, std::numeric_limits<double>::infinity(), 0, std::vector<double>(gr.size(), kNaN)};
    double amax = 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < gr.size(); ++k) {
      if (!ok[k]) continue;
      Vec3 gx = s.fx[k] + delta * s.Nx[k], gy = s.fy[k] + delta * s.Ny[k];
      c.area[k] = gx.cross(gy).norm();
      c.worst = std::min(c.worst, c.area[k]);
      amax = std::max(amax, c.area[k]);
      ++count;
    }
    std::size_t bad = 0;
    for (std::size_t k = 0; k < gr.size(); ++k)
      if (ok[k] && c.area[k] < degenerate_tol * amax) ++bad;
    c.frac = count ? static_cast<double>(bad) / static_cast<double>(count) : 1.0;
    choices.push_back(std::move(c));
  }
  if (choices[0].frac > 0.1 && choices[1].frac > 0.1) throw CompanionError("both parallel surfaces degenerate");
  Choice& best = choices[0].worst >= choices[1].worst ? choices[0] : choices[1];

  CmcCompanion out;
  out.delta = best.delta;
  out.area = best.area;
  out.degenerate_fraction = best.frac;
  out.g.assign(gr.size(), Vec3::Constant(kNaN));
  for (std::size_t k = 0; k < gr.size(); ++k)
    if (ok[k]) out.g[k] = s.f[k] + out.delta * s.N[k];
  double amax = 0;
  for (std::size_t k = 0; k < gr.size(); ++k)
    if (ok[k]) amax = std::max(amax, out.area[k]);
  Stencil<Vec3> st(gr, out.g, ok);
  out.H.assign(gr.size(), kNaN);
  for (int j = 0; j < gr.ny; ++j)
    for (int i = 0; i < gr.nx; ++i) {
      std::size_t k = gr.index(i, j);
      if (!st.available(i, j) || out.area[k] <= area_fraction * amax) continue;
      Vec3 gx = st.dx(i, j), gy = st.dy(i, j);
      const Vec3& n = s.N[k];
      double E = gx.dot(gx), F = gx.dot(gy), G = gy.dot(gy);
      double L = st.dxx(i, j).dot(n), M = st.dxy(i, j).dot(n), Nn = st.dyy(i, j).dot(n);
      out.H[k] = (L * G - 2 * M * F + Nn * E) / (2 * (E * G - F * F));
    }
  return out;
}

/// 3x2 Jacobian [dX/dx dX/dy] of a vector field by finite differences at a node:
/// fourth order where the stencil fits, otherwise second-order centered or one-sided.
inline Eigen::Matrix<double, 3, 2> fd_jacobian(const DomainGrid& g, const std::vector<Vec3>& v, const std::vector<char>& ok,
                                               int i, int j)
{
  auto good = [&](int a, int b) { return a >= 0 && b >= 0 && a < g.nx && b < g.ny && ok[g.index(a, b)]; };
  auto at = [&](int a, int b) -> const Vec3& { return v[g.index(a, b)]; };
  auto deriv = [&](int di, int dj, double h) -> Vec3 {
    if (good(i + 2 * di, j + 2 * dj) && good(i + di, j + dj) && good(i - di, j - dj) && good(i - 2 * di, j - 2 * dj))
      return (-at(i + 2 * di, j + 2 * dj) + 8.0 * at(i + di, j + dj) - 8.0 * at(i - di, j - dj) + at(i - 2 * di, j - 2 * dj)) /
             (12.0 * h);
    if (good(i + di, j + dj) && good(i - di, j - dj)) return (at(i + di, j + dj) - at(i - di, j - dj)) / (2.0 * h);
    if (good(i + di, j + dj)) return (at(i + di, j + dj) - at(i, j)) / h;
    if (good(i - di, j - dj)) return (at(i, j) - at(i - di, j - dj)) / h;
    throw std::invalid_argument("no finite-difference stencil at node");
  };
  Eigen::Matrix<double, 3, 2> J;
  J.col(0) = deriv(1, 0, g.hx());
  J.col(1) = deriv(0, 1, g.hy());
  return J;
}

/// Singular values (descending) of a 3x2 Jacobian.
inline Eigen::Vector2d singular_values(const Eigen::Matrix<double, 3, 2>& J)
{
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J);
  return svd.singularValues();
}

/// Unit right singular vector for the smallest singular value (kernel estimate).
inline Eigen::Vector2d null_vector(const Eigen::Matrix<double, 3, 2>& J)
{
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(J, Eigen::ComputeFullV);
  return svd.matrixV().col(1);
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_GEOMETRY_HPP
