#ifndef SPHEREFORGE_GERM_HPP
#define SPHEREFORGE_GERM_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "sphereforge/bipoly.hpp"
#include "sphereforge/polynomial.hpp"
#include "sphereforge/verdicts.hpp"

namespace sphereforge {

/// Harmonic germ N = (Re g1, Re g2) at 0, considered up to its k-jet.
struct GermPair {
  HoloPoly g1, g2;
  int k = -1;  // jet order; -1 means max(deg g1, deg g2)

  int jet_order() const { return k >= 0 ? k : std::max({g1.degree(), g2.degree(), 1}); }
};

enum class Tristate { Yes, No, Undecided };

inline const char* to_string(Tristate t)
{
  switch (t) {
    case Tristate::Yes: return "yes";
    case Tristate::No: return "no";
    case Tristate::Undecided: return "undecided";
  }
  return "?";
}

struct GermClassification {
  int rank0 = 0;
  WoodVerdict wood;
  std::optional<std::string> orbit;
  Tristate realizable = Tristate::Undecided;
  Tristate versal_by_harmonic = Tristate::Undecided;
  std::optional<int> required_order;
  std::map<std::string, std::string> certificates;
};

class HarmonicityViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

/// Re(g(x + i y)) as an exact real polynomial, truncated to degree k.
inline RationalBiPoly real_part(const HoloPoly& g, int k)
{
  RationalBiPoly re = RationalBiPoly::constant(1), im;
  RationalBiPoly out;
  const RationalBiPoly X = RationalBiPoly::x(), Y = RationalBiPoly::y();
  for (int n = 0; n <= std::min(g.degree(), k); ++n) {
    if (n > 0) {
      RationalBiPoly nre = re * X - im * Y, nim = re * Y + im * X;
      re = nre;
      im = nim;
    }
    ComplexRational a = g.coeff(n);
    out += re.scaled(a.re) - im.scaled(a.im);
  }
  return out;
}

inline Rational lin(const RationalBiPoly& p, int var) { return var == 0 ? p.coeff(1, 0) : p.coeff(0, 1); }

}  // namespace detail

struct RealGerm {
  RationalBiPoly N1, N2;
  int k = 1;
};

inline RealGerm real_germ(const GermPair& p)
{
  if (!p.g1.coeff(0).is_zero() || !p.g2.coeff(0).is_zero()) throw std::invalid_argument("germ components must vanish at 0");
  int k = p.jet_order();
  return {detail::real_part(p.g1, k), detail::real_part(p.g2, k), k};
}

inline RationalBiPoly jacobian_germ(const RealGerm& n) { return n.N1.dx() * n.N2.dy() - n.N1.dy() * n.N2.dx(); }

inline RationalBiPoly jacobian_germ(const GermPair& p) { return jacobian_germ(real_germ(p)); }

inline int rank_at_zero(const RealGerm& n)
{
  Rational a = detail::lin(n.N1, 0), b = detail::lin(n.N1, 1), c = detail::lin(n.N2, 0), d = detail::lin(n.N2, 1);
  if (a * d - b * c != 0) return 2;
  return (a == 0 && b == 0 && c == 0 && d == 0) ? 0 : 1;
}

namespace detail {

// Branch of {J = 0} through a regular point: y = psi(x) or x = psi(y), exact to degree `order`.
inline std::pair<RationalBiPoly, RationalBiPoly> regular_branch(const RationalBiPoly& J, int order)
{
  const Rational jx = J.coeff(1, 0), jy = J.coeff(0, 1);
  const RationalBiPoly t = RationalBiPoly::x();
  RationalBiPoly psi;
  bool solve_y = jy != 0;
  Rational lead = solve_y ? jy : jx;
  for (int it = 0; it <= order; ++it) {
    RationalBiPoly val = solve_y ? J.compose(t, psi, order) : J.compose(psi, t, order);
    psi = (psi - val.scaled(Rational(1) / lead)).truncated(order);
  }
  return solve_y ? std::pair{t, psi} : std::pair{psi, t};
}

// Binary form analysis: number of distinct real linear factors, square-freeness.
struct FormFactors {
  int degree = 0;
  int real_lines = 0;
  bool square_free = false;
  bool all_real = false;
};

inline FormFactors analyze_form(const RationalBiPoly& form, int m)
{
  FormFactors f;
  f.degree = m;
  std::vector<Rational> c(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) c[static_cast<std::size_t>(i)] = form.coeff(m - i, i);  // J_m(1, t)
  RealPoly p(c);
  int at_infinity = m - p.degree();
  bool sf = at_infinity <= 1 && gcd(p, p.derivative()).degree() <= 0;
  int finite = 0;
  if (p.degree() > 0) {
    Rational bound = 1;
    for (const auto& a : p.coeffs()) bound = std::max(bound, Rational(Rational(1) + abs(Rational(a / p.leading()))));
    finite = count_real_roots(p, -bound, bound);
  }
  f.square_free = sf;
  f.real_lines = finite + (at_infinity > 0 ? 1 : 0);
  f.all_real = sf && f.real_lines == m;
  return f;
}

}  // namespace detail

/// Wood's classification of the singular point 0 of a harmonic germ.
inline WoodVerdict wood_classify_germ(const RealGerm& n)
{
  WoodVerdict v;
  // The truncated jet is taken as the germ itself.
  const RationalBiPoly J = jacobian_germ(n);
  v.witness["J"] = to_string(J);
  if (J.is_zero()) {
    v.kind = WoodKind::Degenerate;
    return v;
  }
  int r = rank_at_zero(n);
  v.witness["rank"] = std::to_string(r);
  if (r == 2) {
    v.kind = WoodKind::Regular;
    return v;
  }
  if (r == 0) {
    v.kind = WoodKind::BranchPoint;
    return v;
  }
  const Rational jx = J.coeff(1, 0), jy = J.coeff(0, 1);
  if (J.coeff(0, 0) != 0) throw std::logic_error("rank-1 germ with J(0) != 0");
  if (jx != 0 || jy != 0) {
    // Good point; sigma = (-J_y, J_x) is tangent to the singular set.
    const RationalBiPoly sx = -J.dy(), sy = J.dx();
    RationalBiPoly W1 = n.N1.dx() * sx + n.N1.dy() * sy, W2 = n.N2.dx() * sx + n.N2.dy() * sy;
    if (W1.coeff(0, 0) != 0 || W2.coeff(0, 0) != 0) {
      v.kind = WoodKind::Fold;
      v.witness["grad_sigma_N"] = "(" + to_string(W1.coeff(0, 0)) + ", " + to_string(W2.coeff(0, 0)) + ")";
      return v;
    }
    const int order = 2 * n.k;
    auto [bx, by] = detail::regular_branch(J, order);
    RationalBiPoly w1 = W1.compose(bx, by, order).truncated(order), w2 = W2.compose(bx, by, order).truncated(order);
    v.witness["checked_to_order"] = std::to_string(order);
    if (w1.is_zero() && w2.is_zero()) {
      v.kind = WoodKind::Collapse;
    } else {
      v.kind = WoodKind::GoodHigherOrder;
      int o = std::min(w1.is_zero() ? 1 << 20 : w1.order(), w2.is_zero() ? 1 << 20 : w2.order());
      v.witness["vanishing_order_along_sigma"] = std::to_string(o);
    }
    return v;
  }
  const int m = J.order();
  RationalBiPoly Jm = J.homogeneous(m);
  detail::FormFactors f = detail::analyze_form(Jm, m);
  v.witness["lowest_form"] = to_string(Jm);
  if (f.real_lines == 0 && f.square_free)
    throw HarmonicityViolation("rank-1 point with an isolated singular set");
  if (!f.all_real) {
    v.kind = WoodKind::Unclassified;
    v.witness["reason"] = f.square_free ? "lowest form has non-real factors" : "lowest form is not square-free";
    return v;
  }
  v.kind = WoodKind::MeetingOfFolds;
  v.fold_count = f.real_lines;
  // A harmonic binary form is Re(c z^m): its zero lines sit at equal angles.
  bool harmonic = (Jm.dx().dx() + Jm.dy().dy()).is_zero();
  v.witness["fold_count_even"] = f.real_lines % 2 == 0 ? "true" : "false";
  v.witness["equal_angles"] = harmonic ? "true" : "false";
  return v;
}

inline WoodVerdict wood_classify_germ(const GermPair& p) { return wood_classify_germ(real_germ(p)); }

enum class VersalKind { Rank1KJetX0, BranchLike };

/// Whether an A_e-versal deformation by harmonic germs can exist (dimension count).
inline bool versal_dimension_possible(VersalKind kind, int k)
{
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (kind == VersalKind::Rank1KJetX0) return (k - 1) * (k - 4) <= 0;
  return k < 7;
}

namespace detail {

// Exact A-equivalence to (x, h(x, y)) with h having no linear part, for a rank-1 germ.
inline RationalBiPoly normalize_rank1(const RealGerm& n, std::map<std::string, std::string>& cert)
{
  const int k = n.k;
  RationalBiPoly U = n.N1, V = n.N2;
  if (lin(U, 0) == 0 && lin(U, 1) == 0) std::swap(U, V);
  // Target: remove the linear part of V proportional to that of U.
  Rational lam = lin(U, 0) != 0 ? lin(V, 0) / lin(U, 0) : lin(V, 1) / lin(U, 1);
  V = V - U.scaled(lam);
  // Source: make U's linear part carry x.
  if (lin(U, 0) == 0) {
    U = U.compose(RationalBiPoly::y(), RationalBiPoly::x());
    V = V.compose(RationalBiPoly::y(), RationalBiPoly::x());
  }
  const Rational alpha = lin(U, 0);
  // Invert X = U(x, y) for x = phi(X, y).
  RationalBiPoly phi;
  const RationalBiPoly X = RationalBiPoly::x(), Y = RationalBiPoly::y();
  for (int it = 0; it <= k; ++it) {
    RationalBiPoly rest = U.compose(phi, Y, k) - phi.scaled(alpha);
    phi = (X - rest).scaled(Rational(1) / alpha).truncated(k);
  }
  RationalBiPoly h = V.compose(phi, Y, k).truncated(k);
  h.add(1, 0, -h.coeff(1, 0));
  if (h.coeff(0, 1) != 0) throw std::logic_error("rank-1 normalization left a linear y term");
  cert["normal_form_h"] = to_string(h);
  return h;
}

// Removes pure powers of x from h (target changes v -> v - c u^p).
inline RationalBiPoly drop_pure_x(const RationalBiPoly& h)
{
  RationalBiPoly out;
  for (auto& [key, c] : h.terms())
    if (key.second != 0) out.add(key.first, key.second, c);
  return out;
}

}  // namespace detail

/// Reduction of (x, xy + h.o.t.) to (x, xy + sum_j c_j y^j) through jet order k.
inline std::map<int, Rational> reduce_xy_series(RationalBiPoly h, int k)
{
  const Rational b = h.coeff(1, 1);
  if (b == 0) throw std::invalid_argument("2-jet is not (x, xy)");
  h = h.scaled(Rational(1) / b);
  const RationalBiPoly X = RationalBiPoly::x(), Y = RationalBiPoly::y();
  for (int p = 2; p <= k; ++p) {
    h = detail::drop_pure_x(h);
    for (int a = p - 1; a >= 1; --a) {
      int bdeg = p - a;
      if (a == 1 && bdeg == 1) continue;
      Rational c = h.coeff(a, bdeg);
      if (c == 0) continue;
      // y -> y - c x^{a-1} y^{b} kills x^a y^b against xy; the rest moves to higher degree.
      RationalBiPoly ynew = Y - RationalBiPoly::monomial(a - 1, bdeg, c);
      h = h.compose(X, ynew, k).truncated(k);
    }
  }
  h = detail::drop_pure_x(h);
  std::map<int, Rational> P;
  for (auto& [key, c] : h.terms())
    if (key.first == 0 && key.second >= 3) P[key.second] = c;
  return P;
}

/// Orbit recognition for rank <= 1 germs along the series that admit harmonic
/// representatives, and the realizability / versality verdicts that go with them.
inline GermClassification recognize_orbit(const GermPair& gp)
{
  RealGerm n = real_germ(gp);
  GermClassification out;
  out.rank0 = rank_at_zero(n);
  if (out.rank0 == 2) throw std::invalid_argument("germ is a local diffeomorphism");
  out.wood = wood_classify_germ(n);
  auto& cert = out.certificates;
  cert["jet_order"] = std::to_string(n.k);

  if (out.rank0 == 1) {
    RationalBiPoly h = detail::normalize_rank1(n, cert);
    const Rational c02 = h.coeff(0, 2), c11 = h.coeff(1, 1);
    if (c02 != 0) {
      out.orbit = "fold (x,y^2)";
      out.realizable = Tristate::Yes;
      out.versal_by_harmonic = Tristate::Yes;
      return out;
    }
    if (c11 != 0) {
      std::map<int, Rational> P = reduce_xy_series(h, n.k);
      std::string poly;
      for (auto& [j, c] : P) poly += (poly.empty() ? "" : " + ") + to_string(c) + "*y^" + std::to_string(j);
      cert["P"] = poly.empty() ? "0" : poly;
      out.realizable = Tristate::Yes;
      if (P.empty()) {
        out.orbit = "(x,xy+P1)";
        out.versal_by_harmonic = Tristate::Undecided;
        out.required_order = n.k + 1;
        cert["note"] = "P vanishes through the jet order";
      } else {
        out.orbit = "(x,xy+P1), P1 starts at y^" + std::to_string(P.begin()->first);
        out.versal_by_harmonic = Tristate::Yes;
      }
      return out;
    }
    if (n.k < 3) {
      out.required_order = 3;
      return out;
    }
    // 2-jet (x, 0): inspect the cubic part modulo x^3.
    const Rational d = h.coeff(0, 3), e = h.coeff(1, 2), f = h.coeff(2, 1);
    cert["cubic_y3"] = to_string(d);
    cert["cubic_xy2"] = to_string(e);
    cert["cubic_x2y"] = to_string(f);
    if (d != 0) {
      // y -> y - e x /(3d) clears xy^2; the x^2 y coefficient becomes f - e^2/(3d).
      Rational f2 = f - e * e / (3 * d);
      cert["x2y_after_completion"] = to_string(f2);
      if (f2 == 0) {
        out.orbit = "(x,y^3+-x^ky), k>=3";
        out.realizable = Tristate::No;
        out.versal_by_harmonic = Tristate::No;
      } else if (sign(f2) == -sign(d)) {
        out.orbit = "beaks (x,y^3-x^2y)";
        out.realizable = Tristate::Yes;
        out.versal_by_harmonic = Tristate::Yes;
      } else {
        out.orbit = "lips (x,y^3+x^2y)";
        out.realizable = Tristate::No;
        out.versal_by_harmonic = Tristate::No;
      }
      return out;
    }
    if (e != 0) {
      out.orbit = "(x,xy^2+P2)";
      out.realizable = Tristate::Yes;
      out.versal_by_harmonic = Tristate::Yes;
      return out;
    }
    if (f != 0) {
      out.orbit = "(x,x^2y+P3)";
      out.realizable = Tristate::No;
      out.versal_by_harmonic = Tristate::No;
      return out;
    }
    // 3-jet (x, 0): the largest k with j^k N ~ (x, 0).
    RationalBiPoly rest = detail::drop_pure_x(h);
    int flat = rest.is_zero() ? n.k : rest.order() - 1;
    cert["flat_order"] = std::to_string(flat);
    out.orbit = "k-jet (x,0), k=" + std::to_string(flat);
    if (!versal_dimension_possible(VersalKind::Rank1KJetX0, flat)) {
      out.versal_by_harmonic = Tristate::No;
    } else if (rest.is_zero()) {
      out.required_order = n.k + 1;
    }
    return out;
  }

  // Rank 0: the 2-jet is a pair of harmonic quadratics; classify their span.
  auto quad = [](const RationalBiPoly& p) {
    // p_2 = u (x^2 - y^2) + w (2xy)
    return std::pair<Rational, Rational>{p.coeff(2, 0), p.coeff(1, 1) / 2};
  };
  auto [u1, w1] = quad(n.N1);
  auto [u2, w2] = quad(n.N2);
  Rational det = u1 * w2 - u2 * w1;
  cert["two_jet_det"] = to_string(det);
  if (det != 0) {
    out.orbit = "(x^2-y^2,xy)";
    // Target change taking the 2-jet to exactly (x^2 - y^2, xy).
    Rational inv = Rational(1) / det;
    RationalBiPoly M1 = (n.N1.scaled(w2) - n.N2.scaled(w1)).scaled(inv);
    RationalBiPoly M2 = (n.N2.scaled(u1) - n.N1.scaled(u2)).scaled(inv * Rational(1, 2));
    RationalBiPoly r1 = M1 - M1.homogeneous(2), r2 = M2 - M2.homogeneous(2);
    int o = std::min(r1.is_zero() ? 1 << 20 : r1.order(), r2.is_zero() ? 1 << 20 : r2.order());
    if (o > n.k) {
      out.required_order = n.k + 1;
      return out;
    }
    cert["first_correction_degree"] = std::to_string(o);
    if (o % 2 == 1) {
      int l = (o - 1) / 2;
      out.orbit = "I^" + std::to_string(l) + "_{2,2}";
      cert["l"] = std::to_string(l);
      out.realizable = Tristate::Yes;
      out.versal_by_harmonic = Tristate::Yes;
    }
    return out;
  }
  if (u1 != 0 || w1 != 0 || u2 != 0 || w2 != 0) {
    out.orbit = "(0,xy)";
    // The other component's lowest degree decides the dimension count.
    RationalBiPoly other = (u1 != 0 || w1 != 0) ? n.N2.scaled(u1 != 0 ? u1 : w1) - n.N1.scaled(u1 != 0 ? u2 : w2) : n.N1;
    other = other - other.homogeneous(2);
    if (!other.is_zero()) {
      int kk = other.order();
      cert["branch_k"] = std::to_string(kk);
      out.realizable = Tristate::Yes;
      if (!versal_dimension_possible(VersalKind::BranchLike, kk)) out.versal_by_harmonic = Tristate::No;
    } else {
      out.required_order = n.k + 1;
    }
    return out;
  }
  out.orbit = "(0,0)";
  return out;
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_GERM_HPP
