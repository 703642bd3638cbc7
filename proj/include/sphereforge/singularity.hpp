#ifndef SPHEREFORGE_SINGULARITY_HPP
#define SPHEREFORGE_SINGULARITY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "sphereforge/contour.hpp"
#include "sphereforge/fields.hpp"
#include "sphereforge/geometry.hpp"
#include "sphereforge/polynomial.hpp"
#include "sphereforge/potential.hpp"
#include "sphereforge/verdicts.hpp"

namespace sphereforge {

// ---------------------------------------------------------------- exact mode

namespace detail {

inline int root_multiplicity(const RealPoly& p, const Rational& x0)
{
  if (p.is_zero()) return -1;
  int m = 0;
  RealPoly q = p;
  while (!q.is_zero() && q(x0) == 0) {
    q = q.derivative();
    ++m;
  }
  return m;
}

}  // namespace detail

/// Verdict at (x0, 0) for the surface generated by Cauchy data (b, kappa_g).
inline SingularityVerdict classify_from_cauchy_data(const CauchyData& data, const Rational& x0)
{
  SingularityVerdict v;
  v.x = to_double(x0);
  v.y = 0;
  const RealPoly& b = data.b;
  const RealPoly& k = data.kappa_g;
  Rational kv = k(x0), bv = b(x0), b1 = b.derivative_at(1, x0), b2 = b.derivative_at(2, x0), k1 = k.derivative_at(1, x0);
  v.exact = {{"b", to_string(bv)}, {"b'", to_string(b1)}, {"b''", to_string(b2)}, {"kappa_g", to_string(kv)}, {"kappa_g'", to_string(k1)},
             {"b_identically_zero", b.is_zero() ? "true" : "false"}};
  if (kv != 0) {
    if (b.is_zero())
      v.kind = SingularityKind::ConePoint;
    else if (bv != 0)
      v.kind = SingularityKind::CuspidalEdge;
    else if (b1 != 0)
      v.kind = SingularityKind::Swallowtail;
    else if (b2 != 0)
      v.kind = SingularityKind::CuspidalButterfly;
    else {
      v.kind = SingularityKind::Unclassified;
      v.note = "b vanishes to order >= 3";
    }
  } else if (k1 != 0 && bv != 0) {
    v.kind = SingularityKind::CuspidalBeaks;
  } else {
    v.kind = SingularityKind::Unclassified;
    v.note = bv == 0 ? "b and kappa_g vanish together" : "kappa_g vanishes to order >= 2";
  }
  return v;
}

/// All points of (lo, hi] x {0} that are not cuspidal edges, located exactly
/// (irrational roots are isolated to intervals of width <= width).
inline std::vector<SingularityVerdict> enumerate_cauchy_verdicts(const CauchyData& data, const Rational& lo, const Rational& hi,
                                                                 const Rational& width = Rational(1, 1 << 20))
{
  std::vector<SingularityVerdict> out;
  const RealPoly& b = data.b;
  const RealPoly& k = data.kappa_g;
  auto add = [&](SingularityKind kind, const RootInterval& r, std::map<std::string, std::string> cert, std::string note = "") {
    SingularityVerdict v;
    v.kind = kind;
    v.x = r.approx();
    v.y = 0;
    v.exact = std::move(cert);
    v.exact["x_lo"] = to_string(r.lo);
    v.exact["x_hi"] = to_string(r.hi);
    v.note = std::move(note);
    out.push_back(std::move(v));
  };
  auto shares_root = [](const RealPoly& f, const RealPoly& g, const RootInterval& r) {
    RealPoly c = gcd(f, g);
    if (c.degree() <= 0) return false;
    if (r.exact()) return c(r.lo) == 0;
    return count_real_roots(c, r.lo, r.hi) > 0;
  };

  if (b.is_zero()) {
    // One cone verdict per kappa_g-nonvanishing stretch is reported at its midpoint.
    SingularityVerdict v;
    v.kind = k.is_zero() || count_real_roots(k, lo, hi) > 0 ? SingularityKind::Unclassified : SingularityKind::ConePoint;
    v.x = to_double((lo + hi) / 2);
    v.y = 0;
    v.exact = {{"b_identically_zero", "true"}};
    out.push_back(v);
  } else {
    auto parts = square_free_decomposition(b);
    for (std::size_t m = 0; m < parts.size(); ++m) {
      int mult = static_cast<int>(m) + 1;
      for (const RootInterval& r : isolate_real_roots(parts[m], lo, hi, width)) {
        std::map<std::string, std::string> cert{{"b_root_multiplicity", std::to_string(mult)}};
        if (!k.is_zero() && shares_root(parts[m], k, r)) {
          add(SingularityKind::Unclassified, r, cert, "b and kappa_g vanish together");
        } else if (mult == 1) {
          add(SingularityKind::Swallowtail, r, cert);
        } else if (mult == 2) {
          add(SingularityKind::CuspidalButterfly, r, cert);
        } else {
          add(SingularityKind::Unclassified, r, cert, "b vanishes to order >= 3");
        }
      }
    }
  }
  if (!k.is_zero()) {
    auto parts = square_free_decomposition(k);
    for (std::size_t m = 0; m < parts.size(); ++m) {
      for (const RootInterval& r : isolate_real_roots(parts[m], lo, hi, width)) {
        if (!b.is_zero() && shares_root(parts[m], b, r)) continue;  // reported above
        std::map<std::string, std::string> cert{{"kappa_g_root_multiplicity", std::to_string(m + 1)}};
        if (m == 0 && !b.is_zero())
          add(SingularityKind::CuspidalBeaks, r, cert);
        else
          add(SingularityKind::Unclassified, r, cert, "degenerate kappa_g zero");
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const SingularityVerdict& a, const SingularityVerdict& c) { return a.x < c.x; });
  return out;
}

class DegenerateFrameError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Wood type of the Gauss map along a singular curve with curvature kappa and torsion tau.
inline WoodVerdict wood_classify_along_curve(const HoloPoly& kappa, const HoloPoly& tau, const Rational& x0)
{
  RealPoly k = kappa.real_poly(), t = tau.real_poly();
  if (k(x0) == 0) throw DegenerateFrameError("kappa vanishes at x0: non-degeneracy violated");
  WoodVerdict v;
  v.witness = {{"kappa(x0)", to_string(k(x0))}, {"tau(x0)", to_string(t(x0))}, {"tau_identically_zero", t.is_zero() ? "true" : "false"}};
  if (t.is_zero())
    v.kind = WoodKind::Collapse;
  else if (t(x0) != 0)
    v.kind = WoodKind::Fold;
  else
    v.kind = WoodKind::GoodHigherOrder;
  return v;
}

// ---------------------------------------------------------------- field mode

struct SingularityOptions {
  double tol_cls = 1e-3;
  // |v| <= snap_rel * max|v| counts as zero when contouring.
  double snap_rel = 1e-9;
  // Saddle detection: |v| <= near_zero_rel * max|v|.
  double near_zero_rel = 1e-2;
  // Rank-0 test for dN: largest singular value <= rank0_rel * typical scale.
  double rank0_rel = 1e-6;
};

struct SingularCurve {
  Contour contour;     // zero set of rho^4 |b0| - |c0|
  Contour mu_contour;  // zero set of mu
  std::vector<double> rho, b0_abs, c0_abs;  // per vertex of `contour`
  std::vector<char> rank0;                  // per node: |b0| + |c0| vanishes
  bool rank0_present = false;
  double cross_validation = 0;  // Hausdorff distance between the two contours, in cell diagonals
  ContourTopology topology;
};

namespace detail {

inline double max_abs(const std::vector<double>& v, const std::vector<char>& ok)
{
  double m = 0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (ok[k] && std::isfinite(v[k])) m = std::max(m, std::abs(v[k]));
  return m;
}

inline double hausdorff(const Contour& a, const Contour& b)
{
  double d = 0;
  if (a.vertices.empty() || b.vertices.empty()) return a.vertices.empty() && b.vertices.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& v : a.vertices) d = std::max(d, distance_to_contour(b, v.p));
  for (const auto& v : b.vertices) d = std::max(d, distance_to_contour(a, v.p));
  return d;
}

inline Contour contour_with_topology(const DomainGrid& g, const std::vector<double>& v, const std::vector<char>& ok,
                                     const SingularityOptions& opt)
{
  double vmax = max_abs(v, ok);
  double eps = opt.snap_rel * vmax;
  Contour c = marching_squares(g, v, ok, eps);
  double radius = 2.0 * std::hypot(g.hx(), g.hy());
  c.crossings = find_crossings(g, v, ok, eps, opt.near_zero_rel * vmax, radius);
  analyze_topology(g, ok, c, radius);
  return c;
}

}  // namespace detail

/// Singular set from rho^4|b0| - |c0|, cross-checked against the zero set of mu.
inline SingularCurve extract_singular_set(const SurfaceFields& s, const SingularityOptions& opt = {})
{
  const DomainGrid& g = s.grid;
  SingularCurve out;
  out.rank0.assign(g.size(), 0);
  double scale = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (s.valid[k]) scale = std::max(scale, std::abs(s.b0[k]) + std::abs(s.c0[k]));
  std::vector<double> h(g.size(), 0.0);
  std::vector<char> ok_h(g.size(), 0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!s.valid[k]) continue;
    double ab = std::abs(s.b0[k]), ac = std::abs(s.c0[k]);
    if (ab + ac <= 1e-12 * std::max(scale, 1.0)) {
      out.rank0[k] = 1;
      out.rank0_present = true;
      continue;
    }
    double r2 = s.rho[k] * s.rho[k];
    h[k] = r2 * r2 * ab - ac;
    ok_h[k] = 1;
  }
  out.contour = detail::contour_with_topology(g, h, ok_h, opt);
  out.mu_contour = detail::contour_with_topology(g, s.mu, s.valid, opt);
  out.topology = out.contour.topology;
  out.cross_validation = detail::hausdorff(out.contour, out.mu_contour) / std::hypot(g.hx(), g.hy());
  for (const auto& v : out.contour.vertices) {
    double t = v.t;
    out.rho.push_back((1 - t) * s.rho[v.a] + t * s.rho[v.b]);
    out.b0_abs.push_back(std::abs((1 - t) * s.b0[v.a] + t * s.b0[v.b]));
    out.c0_abs.push_back(std::abs((1 - t) * s.c0[v.a] + t * s.c0[v.b]));
  }
  return out;
}

/// Numeric gradient of a scalar node field (4th order where the stencil fits).
inline std::vector<Vec2> scalar_gradient(const DomainGrid& g, const std::vector<double>& v, const std::vector<char>& ok)
{
  std::vector<Vec3> lifted(g.size(), Vec3::Zero());
  for (std::size_t k = 0; k < g.size(); ++k) lifted[k](0) = v[k];
  std::vector<Vec2> out(g.size(), Vec2::Constant(kNaN));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!ok[g.index(i, j)]) continue;
      try {
        auto J = fd_jacobian(g, lifted, ok, i, j);
        out[g.index(i, j)] = Vec2(J(0, 0), J(0, 1));
      } catch (const std::invalid_argument&) {
      }
    }
  return out;
}

/// Hessian of a scalar node field at a node by centered differences.
inline Eigen::Matrix2d scalar_hessian(const DomainGrid& g, const std::vector<double>& v, const std::vector<char>& ok, int i, int j)
{
  std::vector<Vec3> lifted(0);
  auto val = [&](int a, int b) { return v[g.index(a, b)]; };
  auto good = [&](int a, int b) { return a >= 0 && b >= 0 && a < g.nx && b < g.ny && ok[g.index(a, b)]; };
  bool wide = true;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      if (!good(i + a, j + b)) wide = false;
  Eigen::Matrix2d H;
  const double hx = g.hx(), hy = g.hy();
  if (wide) {
    H(0, 0) = (-val(i + 2, j) + 16 * val(i + 1, j) - 30 * val(i, j) + 16 * val(i - 1, j) - val(i - 2, j)) / (12 * hx * hx);
    H(1, 1) = (-val(i, j + 2) + 16 * val(i, j + 1) - 30 * val(i, j) + 16 * val(i, j - 1) - val(i, j - 2)) / (12 * hy * hy);
    static constexpr double w[5] = {1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12};
    double m = 0;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) m += w[a + 2] * w[b + 2] * val(i + a, j + b);
    H(0, 1) = H(1, 0) = m / (hx * hy);
    return H;
  }
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      if (!good(i + a, j + b)) throw std::invalid_argument("no Hessian stencil at node");
  H(0, 0) = (val(i + 1, j) - 2 * val(i, j) + val(i - 1, j)) / (hx * hx);
  H(1, 1) = (val(i, j + 1) - 2 * val(i, j) + val(i, j - 1)) / (hy * hy);
  H(0, 1) = H(1, 0) = (val(i + 1, j + 1) - val(i + 1, j - 1) - val(i - 1, j + 1) + val(i - 1, j - 1)) / (4 * hx * hy);
  return H;
}

/// Field-mode analysis of a whole run.
struct FieldAnalysis {
  SingularCurve curve;
  std::vector<SingularityVerdict> events;  // every non-edge verdict
  int lips_signatures = 0;                 // isolated rank-1 zeros of mu / positive-definite zero-level Hessians
  int d4_signatures = 0;                   // rank(dN) = 0 points on the singular set
  int edge_vertices = 0;
  int unclassified_vertices = 0;
};

namespace detail {

struct VertexSample {
  Vec2 p;
  double t = 0;  // arclength
  Eigen::Vector2d eta;
  double psi = 0;
  double grad = 0;
  double dN = 0;
  int component = -1;
};

// Least-squares cubic in (t - t0) through the samples with |t - t0| <= w.
inline std::optional<Eigen::Vector4d> local_cubic(const std::vector<VertexSample>& s, double t0, double w)
{
  std::vector<int> idx;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (std::abs(s[k].t - t0) <= w) idx.push_back(static_cast<int>(k));
  if (idx.size() < 4) return std::nullopt;
  Eigen::MatrixXd A(idx.size(), 4);
  Eigen::VectorXd y(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    double u = (s[static_cast<std::size_t>(idx[r])].t - t0) / w;
    A(static_cast<Eigen::Index>(r), 0) = 1;
    A(static_cast<Eigen::Index>(r), 1) = u;
    A(static_cast<Eigen::Index>(r), 2) = u * u;
    A(static_cast<Eigen::Index>(r), 3) = u * u * u;
    y(static_cast<Eigen::Index>(r)) = s[static_cast<std::size_t>(idx[r])].psi;
  }
  Eigen::Vector4d c = A.colPivHouseholderQr().solve(y);
  // Back to derivatives in t at t0: p, p', p''/2, p'''/6.
  return Eigen::Vector4d(c(0), c(1) / w, c(2) / (w * w), c(3) / (w * w * w));
}

}  // namespace detail

/// Classifies the singular set of a run: swallowtails where the null direction
/// crosses Sigma transversally (simple zero of psi = <eta, grad mu>/|grad mu|
/// along Sigma), butterflies at double zeros, cone points where psi vanishes
/// along most of a component, beaks at zero-level saddles of mu.
inline FieldAnalysis analyze_fields(const SurfaceFields& s, const SingularityOptions& opt = {})
{
  const DomainGrid& g = s.grid;
  FieldAnalysis fa;
  fa.curve = extract_singular_set(s, opt);
  const Contour& c = fa.curve.mu_contour;
  std::vector<Vec2> grad = scalar_gradient(g, s.mu, s.valid);
  double dN_scale = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (s.valid[k]) dN_scale = std::max(dN_scale, std::max(s.Nx[k].norm(), s.Ny[k].norm()));
  const double cell = std::max(g.hx(), g.hy());
  const double crossing_radius = 2.5 * std::hypot(g.hx(), g.hy());

  auto sample = [&](int vid) {
    const ContourVertex& v = c.vertices[static_cast<std::size_t>(vid)];
    const double t = v.t;
    auto lerp3 = [&](const std::vector<Vec3>& f) -> Vec3 { return (1 - t) * f[v.a] + t * f[v.b]; };
    detail::VertexSample vs;
    vs.p = v.p;
    vs.component = c.component[static_cast<std::size_t>(vid)];
    Eigen::Matrix<double, 3, 2> Jf, JN;
    Jf.col(0) = lerp3(s.fx);
    Jf.col(1) = lerp3(s.fy);
    JN.col(0) = lerp3(s.Nx);
    JN.col(1) = lerp3(s.Ny);
    vs.eta = null_vector(Jf);
    vs.dN = singular_values(JN)(0);
    Vec2 gm = (1 - t) * grad[v.a] + t * grad[v.b];
    vs.grad = gm.norm();
    vs.psi = vs.grad > 0 ? vs.eta.dot(gm) / vs.grad : 0;
    return vs;
  };

  // Rank-0 points of dN on Sigma are D4 signatures.
  for (std::size_t k = 0; k < c.vertices.size(); ++k) {
    detail::VertexSample vs = sample(static_cast<int>(k));
    if (vs.dN <= opt.rank0_rel * std::max(dN_scale, 1e-300)) ++fa.d4_signatures;
  }

  // Degenerate points: zero-level saddles of mu.
  for (const Crossing& x : c.crossings) {
    int i = static_cast<int>(x.node % static_cast<std::size_t>(g.nx)), j = static_cast<int>(x.node / static_cast<std::size_t>(g.nx));
    SingularityVerdict v;
    v.x = x.p.x();
    v.y = x.p.y();
    Eigen::Matrix2d H;
    try {
      H = scalar_hessian(g, s.mu, s.valid, i, j);
    } catch (const std::invalid_argument&) {
      v.kind = SingularityKind::Unclassified;
      v.note = "degenerate point without Hessian stencil";
      fa.events.push_back(v);
      continue;
    }
    Eigen::Matrix<double, 3, 2> Jf;
    Jf.col(0) = s.fx[x.node];
    Jf.col(1) = s.fy[x.node];
    Eigen::Vector2d eta = null_vector(Jf);
    double det = H.determinant();
    double hee = eta.dot(H * eta);
    double hn = H.norm();
    v.numeric = {{"det_hess_mu", det}, {"hess_mu_eta_eta", hee}, {"hess_norm", hn}, {"dN_norm", std::max(s.Nx[x.node].norm(), s.Ny[x.node].norm())}};
    if (std::max(s.Nx[x.node].norm(), s.Ny[x.node].norm()) <= opt.rank0_rel * dN_scale) {
      v.kind = SingularityKind::NotAFront;
    } else if (det < -opt.tol_cls * hn * hn && std::abs(hee) > opt.tol_cls * hn) {
      v.kind = SingularityKind::CuspidalBeaks;
    } else {
      if (det > opt.tol_cls * hn * hn) ++fa.lips_signatures;
      v.kind = SingularityKind::Unclassified;
      v.note = "degenerate point outside the recognised patterns";
    }
    fa.events.push_back(v);
  }
  fa.lips_signatures += c.topology.closed_small_loops;

  // Isolated near-zero extrema of mu (a lips point may fall between contour levels).
  {
    double mmax = detail::max_abs(s.mu, s.valid);
    static constexpr int ring[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        std::size_t k = g.index(i, j);
        if (!s.valid[k] || std::abs(s.mu[k]) > opt.near_zero_rel * mmax) continue;
        bool all_pos = true, all_neg = true, full = true;
        for (auto& r : ring) {
          std::size_t q = g.index(i + r[0], j + r[1]);
          if (!s.valid[q]) full = false;
          if (!(s.mu[q] > std::abs(s.mu[k]))) all_pos = false;
          if (!(s.mu[q] < -std::abs(s.mu[k]))) all_neg = false;
        }
        if (full && (all_pos || all_neg)) ++fa.lips_signatures;
      }
  }

  // Scan each branch, cut at degenerate points.
  auto near_crossing = [&](const Vec2& p) {
    for (const Crossing& x : c.crossings)
      if ((x.p - p).norm() <= crossing_radius) return true;
    return false;
  };
  std::vector<std::vector<detail::VertexSample>> pieces;
  for (const auto& br : c.branches) {
    std::vector<detail::VertexSample> cur;
    for (int vid : br) {
      const Vec2& p = c.vertices[static_cast<std::size_t>(vid)].p;
      if (near_crossing(p)) {
        if (!cur.empty()) pieces.push_back(std::move(cur));
        cur.clear();
        continue;
      }
      detail::VertexSample vs = sample(vid);
      if (!cur.empty()) {
        vs.t = cur.back().t + (vs.p - cur.back().p).norm();
        if (vs.eta.dot(cur.back().eta) < 0) {
          vs.eta = -vs.eta;
          vs.psi = -vs.psi;
        }
      }
      cur.push_back(vs);
    }
    if (!cur.empty()) pieces.push_back(std::move(cur));
  }

  const double tol = opt.tol_cls;
  const double w = 4 * cell;
  std::set<int> cone_components;
  for (const auto& piece : pieces) {
    if (piece.size() < 4) continue;
    std::size_t small = 0;
    for (const auto& vs : piece) small += std::abs(vs.psi) <= tol;
    if (static_cast<double>(small) >= 0.8 * static_cast<double>(piece.size())) {
      if (cone_components.insert(piece.front().component).second) {
        SingularityVerdict v;
        v.kind = SingularityKind::ConePoint;
        const auto& mid = piece[piece.size() / 2];
        v.x = mid.p.x();
        v.y = mid.p.y();
        v.numeric = {{"psi_small_fraction", static_cast<double>(small) / static_cast<double>(piece.size())}};
        fa.events.push_back(v);
      }
      continue;
    }
    // Zeros of psi along the piece.
    struct Root {
      double t;
      std::size_t k;
    };
    std::vector<Root> roots;
    for (std::size_t k = 0; k + 1 < piece.size(); ++k) {
      double a = piece[k].psi, b = piece[k + 1].psi;
      if ((a < 0 && b >= 0) || (a >= 0 && b < 0)) {
        double t = piece[k].t + (piece[k + 1].t - piece[k].t) * (a / (a - b));
        roots.push_back({t, k});
      }
    }
    auto lobe_max = [&](std::size_t k0, std::size_t k1) {
      double m = 0;
      for (std::size_t k = k0 + 1; k <= k1; ++k) m = std::max(m, std::abs(piece[k].psi));
      return m;
    };
    auto locate = [&](double t) {
      std::size_t best = 0;
      for (std::size_t k = 0; k < piece.size(); ++k)
        if (std::abs(piece[k].t - t) < std::abs(piece[best].t - t)) best = k;
      return best;
    };
    auto emit = [&](SingularityKind kind, double t, std::map<std::string, double> cert, std::string note = "") {
      std::size_t k = locate(t);
      SingularityVerdict v;
      v.kind = kind;
      // Interpolate the position between the bracketing vertices.
      std::size_t k2 = (piece[k].t <= t && k + 1 < piece.size()) ? k + 1 : (k > 0 ? k - 1 : k);
      double span = piece[k2].t - piece[k].t;
      double a = span != 0 ? (t - piece[k].t) / span : 0;
      Vec2 p = (1 - a) * piece[k].p + a * piece[k2].p;
      v.x = p.x();
      v.y = p.y();
      cert["grad_mu"] = piece[k].grad;
      v.numeric = std::move(cert);
      v.note = std::move(note);
      fa.events.push_back(v);
    };
    auto curvature_at = [&](double t) -> std::optional<Eigen::Vector4d> { return detail::local_cubic(piece, t, w); };

    std::vector<char> consumed(roots.size(), 0);
    for (std::size_t r = 0; r + 1 < roots.size(); ++r) {
      if (consumed[r]) continue;
      if (lobe_max(roots[r].k, roots[r + 1].k) <= tol && roots[r + 1].t - roots[r].t <= w) {
        consumed[r] = consumed[r + 1] = 1;
        double t = 0.5 * (roots[r].t + roots[r + 1].t);
        auto p = curvature_at(t);
        double curv = p ? 2 * (*p)(2) : 0;
        if (p && std::abs(curv) >= tol)
          emit(SingularityKind::CuspidalButterfly, t, {{"psi_min", (*p)(0)}, {"psi_tt", curv}});
        else
          emit(SingularityKind::Unclassified, t, {{"psi_tt", curv}}, "tangency of order >= 4");
      }
    }
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (consumed[r]) continue;
      auto p = curvature_at(roots[r].t);
      double slope = p ? (*p)(1) : (piece[roots[r].k + 1].psi - piece[roots[r].k].psi) / (piece[roots[r].k + 1].t - piece[roots[r].k].t);
      if (std::abs(slope) >= tol)
        emit(SingularityKind::Swallowtail, roots[r].t, {{"psi_t", slope}, {"psi_tt", p ? 2 * (*p)(2) : kNaN}});
      else
        emit(SingularityKind::Unclassified, roots[r].t, {{"psi_t", slope}}, "tangency of order >= 3");
    }
    // Touching zeros without a sign change.
    for (std::size_t k = 1; k + 1 < piece.size(); ++k) {
      double a = std::abs(piece[k].psi);
      if (a > tol || a > std::abs(piece[k - 1].psi) || a > std::abs(piece[k + 1].psi)) continue;
      bool near_root = false;
      for (const Root& r : roots)
        if (std::abs(r.t - piece[k].t) <= w) near_root = true;
      if (near_root) continue;
      auto p = curvature_at(piece[k].t);
      if (!p) continue;
      // Refine the extremum of the cubic near t_k.
      double t = piece[k].t;
      double curv = 2 * (*p)(2);
      if (std::abs(curv) >= tol && std::abs((*p)(0)) <= tol)
        emit(SingularityKind::CuspidalButterfly, t, {{"psi_min", (*p)(0)}, {"psi_tt", curv}});
      else if (std::abs((*p)(0)) <= tol)
        emit(SingularityKind::Unclassified, t, {{"psi_tt", curv}}, "tangency of order >= 4");
    }
    for (const auto& vs : piece) {
      if (std::abs(vs.psi) > tol)
        ++fa.edge_vertices;
      else
        ++fa.unclassified_vertices;
    }
  }
  std::sort(fa.events.begin(), fa.events.end(), [](const SingularityVerdict& a, const SingularityVerdict& b) {
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
  });
  return fa;
}

struct MorseTransition {
  bool endpoints_matched = false;
  bool pairing_changed = false;
  bool crossing_at_zero = false;
  bool holds() const { return endpoints_matched && pairing_changed && crossing_at_zero; }
};

/// Compares the boundary-endpoint pairing on either side of s = 0. Endpoints are
/// matched across the two runs by nearest boundary angle.
inline MorseTransition morse_transition(const ContourTopology& minus, const ContourTopology& zero, const ContourTopology& plus)
{
  MorseTransition m;
  m.crossing_at_zero = zero.crossings > 0;
  const auto& am = minus.endpoint_angles;
  const auto& ap = plus.endpoint_angles;
  if (am.size() != ap.size() || am.empty()) return m;
  auto circ = [](double a, double b) {
    double d = std::fmod(std::abs(a - b), 2 * std::numbers::pi);
    return std::min(d, 2 * std::numbers::pi - d);
  };
  std::vector<int> to_plus(am.size(), -1);
  std::vector<char> taken(ap.size(), 0);
  for (std::size_t k = 0; k < am.size(); ++k) {
    std::size_t best = 0;
    for (std::size_t q = 1; q < ap.size(); ++q)
      if (circ(am[k], ap[q]) < circ(am[k], ap[best])) best = q;
    if (taken[best]) return m;
    taken[best] = 1;
    to_plus[k] = static_cast<int>(best);
  }
  m.endpoints_matched = true;
  auto mapped = endpoint_pairing(minus);
  for (auto& group : mapped) {
    for (int& e : group) e = to_plus[static_cast<std::size_t>(e)];
    std::sort(group.begin(), group.end());
  }
  std::sort(mapped.begin(), mapped.end());
  m.pairing_changed = mapped != endpoint_pairing(plus);
  return m;
}

/// Verdict at a grid node on the singular set, reusing a precomputed analysis.
inline SingularityVerdict classify_frontal_point(const SurfaceFields& s, const FieldAnalysis& fa, int i, int j)
{
  const DomainGrid& g = s.grid;
  std::size_t k = g.index(i, j);
  if (!s.valid[k]) throw std::invalid_argument("node is invalid");
  Vec2 p(g.x(i), g.y(j));
  double dN_scale = 0;
  for (std::size_t q = 0; q < g.size(); ++q)
    if (s.valid[q]) dN_scale = std::max(dN_scale, std::max(s.Nx[q].norm(), s.Ny[q].norm()));
  if (std::max(s.Nx[k].norm(), s.Ny[k].norm()) <= 1e-6 * dN_scale) {
    SingularityVerdict v;
    v.kind = SingularityKind::NotAFront;
    v.x = p.x();
    v.y = p.y();
    return v;
  }
  const double cell = std::hypot(g.hx(), g.hy());
  const SingularityVerdict* best = nullptr;
  double best_d = 2 * cell;
  for (const auto& e : fa.events) {
    double d = (Vec2(e.x, e.y) - p).norm();
    if (d <= best_d) {
      best_d = d;
      best = &e;
    }
  }
  if (best) return *best;
  if (distance_to_contour(fa.curve.mu_contour, p) > cell) throw std::invalid_argument("node is not on the singular set");
  SingularityVerdict v;
  v.kind = SingularityKind::CuspidalEdge;
  v.x = p.x();
  v.y = p.y();
  Eigen::Matrix<double, 3, 2> Jf;
  Jf.col(0) = s.fx[k];
  Jf.col(1) = s.fy[k];
  Eigen::Vector2d eta = null_vector(Jf);
  std::vector<Vec2> grad = scalar_gradient(g, s.mu, s.valid);
  if (std::isfinite(grad[k].x()) && grad[k].norm() > 0) v.numeric["psi"] = eta.dot(grad[k]) / grad[k].norm();
  return v;
}

inline SingularityVerdict classify_frontal_point(const SurfaceFields& s, int i, int j, const SingularityOptions& opt = {})
{
  return classify_frontal_point(s, analyze_fields(s, opt), i, j);
}

class RankError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct NullDirections {
  Eigen::Vector2d eta_f, eta_N;
};

/// Kernel directions of the finite-difference Jacobians of f and N at a node.
inline NullDirections null_directions(const SurfaceFields& s, int i, int j, double rank_tol = 1e-3)
{
  const DomainGrid& g = s.grid;
  std::vector<char> ok(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) ok[k] = s.valid[k] && std::isfinite(s.f[k](0));
  auto JN = fd_jacobian(g, s.N, ok, i, j);
  auto Jf = fd_jacobian(g, s.f, ok, i, j);
  Eigen::Vector2d sN = singular_values(JN), sf = singular_values(Jf);
  if (sN(0) <= 1e-12 || sN(1) > rank_tol * sN(0) || sf(1) > rank_tol * sf(0)) throw RankError("rank(dN) is not 1 at node");
  return {null_vector(Jf), null_vector(JN)};
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_SINGULARITY_HPP
