#ifndef SPHEREFORGE_DPW_HPP
#define SPHEREFORGE_DPW_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sphereforge/fields.hpp"
#include "sphereforge/iwasawa.hpp"
#include "sphereforge/loop.hpp"
#include "sphereforge/parallel.hpp"
#include "sphereforge/potential.hpp"

namespace sphereforge {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegrationOptions {
  int degree = 16;
  // Upper bound on the RK4 step; the grid also imposes h_min / 2.
  double max_step = 1.0 / 256;
  int workers = 0;
};

struct PipelineOptions {
  int degree = 16;
  double max_step = 1.0 / 256;
  double tol_det = 1e-8;
  double tol_unit = 1e-8;
  double tol_recomp = 1e-6;
  int workers = 0;
};

namespace detail {

// Twisted loop in compact form: coefficient n is diag(u_n, v_n) for even n
// and [[0, u_n], [v_n, 0]] for odd n.
struct TwistedBuf {
  int d = 0;
  std::vector<cplx> u, v;
  explicit TwistedBuf(int degree = 0) : d(degree), u(static_cast<std::size_t>(2 * degree + 1)), v(u.size()) {}
  void set_identity()
  {
    std::fill(u.begin(), u.end(), cplx(0));
    std::fill(v.begin(), v.end(), cplx(0));
    u[static_cast<std::size_t>(d)] = 1;
    v[static_cast<std::size_t>(d)] = 1;
  }
  LaurentLoop to_loop() const
  {
    LaurentLoop l(d, Parity::Twisted);
    for (int n = -d; n <= d; ++n) {
      cplx a = u[static_cast<std::size_t>(n + d)], b = v[static_cast<std::size_t>(n + d)];
      if (n % 2 == 0) {
        l[n](0, 0) = a;
        l[n](1, 1) = b;
      } else {
        l[n](0, 1) = a;
        l[n](1, 0) = b;
      }
    }
    return l;
  }
  static TwistedBuf from_loop(const LaurentLoop& l)
  {
    TwistedBuf t(l.degree());
    for (int n = -t.d; n <= t.d; ++n) {
      auto k = static_cast<std::size_t>(n + t.d);
      if (n % 2 == 0) {
        t.u[k] = l[n](0, 0);
        t.v[k] = l[n](1, 1);
      } else {
        t.u[k] = l[n](0, 1);
        t.v[k] = l[n](1, 0);
      }
    }
    return t;
  }
};

struct ATerm {
  int power;
  cplx u, v;
};

inline void eval_terms(const NumericPotential& p, cplx z, std::vector<ATerm>& out)
{
  out.clear();
  for (const auto& t : p.terms) {
    cplx a = t.first(z);
    cplx b = t.negate_second ? -t.second(z) : t.second(z);
    out.push_back({t.power, a, b});
  }
}

// out = scale * (phi * A), truncated to phi's degree.
inline void mul_A(const TwistedBuf& phi, const std::vector<ATerm>& a, cplx scale, TwistedBuf& out)
{
  const int d = phi.d;
  std::fill(out.u.begin(), out.u.end(), cplx(0));
  std::fill(out.v.begin(), out.v.end(), cplx(0));
  for (const ATerm& t : a) {
    const cplx tu = t.u * scale, tv = t.v * scale;
    const int lo = std::max(-d, -d - t.power), hi = std::min(d, d - t.power);
    for (int n = lo; n <= hi; ++n) {
      const auto src = static_cast<std::size_t>(n + d);
      const auto dst = static_cast<std::size_t>(n + t.power + d);
      const cplx pu = phi.u[src], pv = phi.v[src];
      // diag * (diag or off) keeps slot order; off * (diag or off) swaps it.
      if (n % 2 == 0) {
        out.u[dst] += pu * tu;
        out.v[dst] += pv * tv;
      } else {
        out.u[dst] += pu * tv;
        out.v[dst] += pv * tu;
      }
    }
  }
}

inline void axpy(TwistedBuf& y, const TwistedBuf& x, const TwistedBuf& k, double c)
{
  for (std::size_t i = 0; i < y.u.size(); ++i) {
    y.u[i] = x.u[i] + c * k.u[i];
    y.v[i] = x.v[i] + c * k.v[i];
  }
}

// Integrates Phi' = Phi A along the straight segment za -> zb with `steps` RK4 steps.
inline void rk4_segment(const NumericPotential& p, TwistedBuf& phi, cplx za, cplx zb, int steps)
{
  if (steps <= 0 || za == zb) return;
  const cplx dz = (zb - za) / static_cast<double>(steps);
  if (std::abs(dz) < 1e-300) throw IntegrationError("step size underflow");
  TwistedBuf k1(phi.d), k2(phi.d), k3(phi.d), k4(phi.d), tmp(phi.d);
  std::vector<ATerm> a0, am, a1;
  eval_terms(p, za, a0);
  for (int s = 0; s < steps; ++s) {
    cplx z = za + static_cast<double>(s) * dz;
    eval_terms(p, z + 0.5 * dz, am);
    eval_terms(p, s + 1 == steps ? zb : z + dz, a1);
    mul_A(phi, a0, dz, k1);
    axpy(tmp, phi, k1, 0.5);
    mul_A(tmp, am, dz, k2);
    axpy(tmp, phi, k2, 0.5);
    mul_A(tmp, am, dz, k3);
    axpy(tmp, phi, k3, 1.0);
    mul_A(tmp, a1, dz, k4);
    for (std::size_t i = 0; i < phi.u.size(); ++i) {
      phi.u[i] += (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]) / 6.0;
      phi.v[i] += (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]) / 6.0;
    }
    a0.swap(a1);
  }
}

inline Vec3 to_vec3(const CVec3& v) { return v.real(); }

}  // namespace detail

/// Coordinates of X in the basis e1, e2, e3 (complex for sl(2,C)).
inline CVec3 su2_coords(const Mat2& x)
{
  const cplx i(0, 1);
  return {-i * (x(0, 1) + x(1, 0)), x(1, 0) - x(0, 1), -i * (x(0, 0) - x(1, 1))};
}

inline Mat2 su2_basis(int k)
{
  const cplx i(0, 1);
  Mat2 m = Mat2::Zero();
  if (k == 0) {
    m(0, 1) = i * 0.5;
    m(1, 0) = i * 0.5;
  } else if (k == 1) {
    m(0, 1) = -0.5;
    m(1, 0) = 0.5;
  } else {
    m(0, 0) = i * 0.5;
    m(1, 1) = -i * 0.5;
  }
  return m;
}

/// Phi along a polyline of waypoints starting from `start` (identity by default),
/// each leg split into ceil(length / max_step) RK4 steps.
inline LaurentLoop integrate_path(const Potential& p, const std::vector<cplx>& waypoints, int degree, double max_step)
{
  NumericPotential np(p);
  detail::TwistedBuf phi(degree);
  phi.set_identity();
  for (std::size_t k = 1; k < waypoints.size(); ++k) {
    int steps = static_cast<int>(std::ceil(std::abs(waypoints[k] - waypoints[k - 1]) / max_step));
    detail::rk4_segment(np, phi, waypoints[k - 1], waypoints[k], steps);
  }
  return phi.to_loop();
}

/// Phi at every grid node, integrated on the straight segment from the base point.
/// All nodes use the same number of steps so the discretization error is a
/// smooth function of the node.
inline std::vector<LaurentLoop> integrate_phi(const Potential& p, const DomainGrid& grid, const IntegrationOptions& opt = {})
{
  grid.validate();
  NumericPotential np(p);
  const cplx z0 = grid.base_point;
  double lmax = 0;
  for (double x : {grid.x_min, grid.x_max})
    for (double y : {grid.y_min, grid.y_max}) lmax = std::max(lmax, std::abs(cplx(x, y) - z0));
  const double step = std::min(std::min(grid.hx(), grid.hy()) / 2, opt.max_step);
  const int steps = std::max(1, static_cast<int>(std::ceil(lmax / step)));
  std::vector<LaurentLoop> out(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t idx) {
        int i = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
        int j = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
        detail::TwistedBuf phi(opt.degree);
        phi.set_identity();
        cplx z = grid.node(i, j);
        if (std::abs(z - z0) > 0) detail::rk4_segment(np, phi, z0, z, steps);
        out[idx] = phi.to_loop();
      },
      opt.workers);
  auto [i0, j0] = grid.base_indices();
  out[grid.index(i0, j0)] = LaurentLoop::identity(opt.degree);
  return out;
}

enum class PathOrder { RowFirst, ColumnFirst };

namespace detail {

// Cumulative integral of g along a line of samples, zero at index s. Only the
// run of valid samples containing s is integrated; others are left invalid.
// Fourth order: interior cells use the cubic through four neighbours, end cells
// a one-sided cubic, and lines shorter than four samples fall back to trapezoids.
inline void integrate_line(const std::vector<Vec3>& g, const std::vector<char>& ok, int s, double h, std::vector<Vec3>& out,
                           std::vector<char>& out_ok)
{
  const int m = static_cast<int>(g.size());
  out.assign(g.size(), Vec3::Zero());
  out_ok.assign(g.size(), 0);
  if (!ok[static_cast<std::size_t>(s)]) return;
  int lo = s, hi = s;
  while (lo > 0 && ok[static_cast<std::size_t>(lo - 1)]) --lo;
  while (hi < m - 1 && ok[static_cast<std::size_t>(hi + 1)]) ++hi;
  auto G = [&](int k) -> const Vec3& { return g[static_cast<std::size_t>(k)]; };
  auto cell = [&](int k) -> Vec3 {  // integral over [k, k+1]
    if (hi - lo + 1 < 4) return h * 0.5 * (G(k) + G(k + 1));
    if (k - 1 >= lo && k + 2 <= hi) return h / 24.0 * (-G(k - 1) + 13.0 * G(k) + 13.0 * G(k + 1) - G(k + 2));
    if (k - 1 < lo) return h / 24.0 * (9.0 * G(k) + 19.0 * G(k + 1) - 5.0 * G(k + 2) + G(k + 3));
    return h / 24.0 * (G(k - 2) - 5.0 * G(k - 1) + 19.0 * G(k) + 9.0 * G(k + 1));
  };
  out_ok[static_cast<std::size_t>(s)] = 1;
  for (int k = s; k < hi; ++k) {
    out[static_cast<std::size_t>(k + 1)] = out[static_cast<std::size_t>(k)] + cell(k);
    out_ok[static_cast<std::size_t>(k + 1)] = 1;
  }
  for (int k = s - 1; k >= lo; --k) {
    out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k + 1)] - cell(k);
    out_ok[static_cast<std::size_t>(k)] = 1;
  }
}

}  // namespace detail

/// f from f_x = N x N_y, f_y = -N x N_x with f(z0) = 0. Returns per-node
/// reachability (nodes cut off by invalid ones are unreachable).
inline std::vector<char> integrate_surface(SurfaceFields& fields, PathOrder order = PathOrder::RowFirst)
{
  const DomainGrid& g = fields.grid;
  auto [i0, j0] = g.base_indices();
  std::vector<char> reach(g.size(), 0);
  std::vector<Vec3> samples, integ;
  std::vector<char> ok, iok;
  const bool row_first = order == PathOrder::RowFirst;
  const int n_first = row_first ? g.nx : g.ny;
  const int n_second = row_first ? g.ny : g.nx;
  const int s_first = row_first ? i0 : j0;
  const int s_second = row_first ? j0 : i0;
  auto idx = [&](int a, int b) { return row_first ? g.index(a, b) : g.index(b, a); };
  const auto& d_first = row_first ? fields.fx : fields.fy;
  const auto& d_second = row_first ? fields.fy : fields.fx;
  const double h_first = row_first ? g.hx() : g.hy();
  const double h_second = row_first ? g.hy() : g.hx();

  samples.resize(static_cast<std::size_t>(n_first));
  ok.resize(samples.size());
  for (int a = 0; a < n_first; ++a) {
    samples[static_cast<std::size_t>(a)] = d_first[idx(a, s_second)];
    ok[static_cast<std::size_t>(a)] = fields.valid[idx(a, s_second)];
  }
  detail::integrate_line(samples, ok, s_first, h_first, integ, iok);
  std::vector<Vec3> spine = integ;
  std::vector<char> spine_ok = iok;

  samples.resize(static_cast<std::size_t>(n_second));
  ok.resize(samples.size());
  for (int a = 0; a < n_first; ++a) {
    if (!spine_ok[static_cast<std::size_t>(a)]) continue;
    for (int b = 0; b < n_second; ++b) {
      samples[static_cast<std::size_t>(b)] = d_second[idx(a, b)];
      ok[static_cast<std::size_t>(b)] = fields.valid[idx(a, b)];
    }
    detail::integrate_line(samples, ok, s_second, h_second, integ, iok);
    for (int b = 0; b < n_second; ++b) {
      if (!iok[static_cast<std::size_t>(b)]) continue;
      fields.f[idx(a, b)] = spine[static_cast<std::size_t>(a)] + integ[static_cast<std::size_t>(b)];
      reach[idx(a, b)] = 1;
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!reach[k]) fields.f[k] = Vec3::Constant(std::nan(""));
  return reach;
}

/// Full pipeline: Phi, Iwasawa, frame, N and its analytic derivatives, f.
inline SurfaceFields run_pipeline(const Potential& p, const DomainGrid& grid, const PipelineOptions& opt = {})
{
  grid.validate();
  IntegrationOptions io;
  io.degree = opt.degree;
  io.max_step = opt.max_step;
  io.workers = opt.workers;
  std::vector<LaurentLoop> phi = integrate_phi(p, grid, io);
  NumericPotential np(p);

  SurfaceFields out;
  out.grid = grid;
  out.resize(grid.size());
  const Mat2 e3 = su2_basis(2);
  const int samples = default_sample_count(opt.degree);
  IwasawaOptions iw;
  iw.tol_det = opt.tol_det;

  parallel_for(
      grid.size(),
      [&](std::size_t idx) {
        int i = static_cast<int>(idx % static_cast<std::size_t>(grid.nx));
        int j = static_cast<int>(idx / static_cast<std::size_t>(grid.nx));
        const cplx z = grid.node(i, j);
        IwasawaFactors fac;
        try {
          fac = iwasawa_factor(phi[idx], iw);
        } catch (const IwasawaError&) {
          return;
        }
        Mat2 F = loop_eval(fac.unitary_part, 1.0);
        double recomp = 0, unit = 0;
        for (int k = 0; k < samples; ++k) {
          cplx l = circle_sample(k, samples);
          Mat2 fv = loop_eval(fac.unitary_part, l);
          recomp = std::max(recomp, norm2(fv * loop_eval(fac.plus_part, l) - loop_eval(phi[idx], l)));
          unit = std::max(unit, norm2(fv.adjoint() * fv - Mat2::Identity()));
        }
        const Mat2& B0 = fac.plus_part[0];
        cplx b0 = np.b0.is_zero() ? cplx(0) : np.b0(z);
        cplx c0 = np.c0.is_zero() ? cplx(0) : np.c0(z);
        Mat2 am1;
        am1 << 0, b0, c0, 0;
        Mat2 U = B0 * am1 * B0.inverse();
        Mat2 X = U * e3 - e3 * U;
        Mat2 Fa = F.adjoint();
        Vec3 N = su2_coords(F * e3 * Fa).real();
        CVec3 nu = su2_coords(F * X * Fa);
        Vec3 Nx = 2.0 * nu.real();
        Vec3 Ny = -2.0 * nu.imag();
        out.valid[idx] = 1;
        out.N[idx] = N;
        out.Nx[idx] = Nx;
        out.Ny[idx] = Ny;
        out.fx[idx] = N.cross(Ny);
        out.fy[idx] = -N.cross(Nx);
        out.mu[idx] = Nx.cross(Ny).dot(N);
        out.rho[idx] = fac.rho;
        out.b0[idx] = b0;
        out.c0[idx] = c0;
        out.frame[idx] = F;
        out.recomposition_error[idx] = recomp;
        out.unitarity_error[idx] = unit;
        out.b0_offdiag[idx] = fac.b0_offdiag;
      },
      opt.workers);
  integrate_surface(out);
  return out;
}

enum class BaseRank { Rank2, RankAtMost1, Rank0 };

inline const char* to_string(BaseRank r)
{
  switch (r) {
    case BaseRank::Rank2: return "rank2";
    case BaseRank::RankAtMost1: return "rank<=1";
    case BaseRank::Rank0: return "rank0";
  }
  return "?";
}

/// Exact rank verdict at the base point from |b0(z0)| versus |c0(z0)|.
inline BaseRank rank_at_basepoint(const Potential& p)
{
  auto [b, c] = lowest_order_pair(p, p.base_point);
  if (b.is_zero() && c.is_zero()) return BaseRank::Rank0;
  return b.norm() == c.norm() ? BaseRank::RankAtMost1 : BaseRank::Rank2;
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_DPW_HPP
