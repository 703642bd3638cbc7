#ifndef SPHEREFORGE_VERSALITY_HPP
#define SPHEREFORGE_VERSALITY_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include "sphereforge/bipoly.hpp"
#include "sphereforge/quad_ext.hpp"
#include "sphereforge/rational.hpp"

namespace sphereforge {

/// Monge-form family g_s = (x, y, h_s) with
/// h_s = sum a_ij x^i y^j + s * sum beta_ijk x^i y^j s^k and radius function r.
template <typename T>
struct MongeT {
  std::map<std::pair<int, int>, T> a;
  std::map<std::tuple<int, int, int>, T> beta;
  T r0 = T(0), r1 = T(0);  // radius function r(s) = r0 - r1 s
  // Explicit centre height; when absent the focal value 1/(2 a02) is used.
  std::optional<T> c0;
  bool rotated = false;

  T A(int i, int j) const
  {
    auto it = a.find({i, j});
    return it == a.end() ? T(0) : it->second;
  }
  T B(int i, int j, int k) const
  {
    auto it = beta.find({i, j, k});
    return it == beta.end() ? T(0) : it->second;
  }
};

using MongeFamily = MongeT<Rational>;
using RotatedMonge = MongeT<Algebraic>;

class UmbilicError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
class NotNormalizedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
class WrongStratumError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class DistSqKind { A1plus, A1minus, A2, A3transverse, A3nonTransMinus, A3nonTransPlus, A4, Worse };

inline const char* to_string(DistSqKind k)
{
  switch (k) {
    case DistSqKind::A1plus: return "A1plus";
    case DistSqKind::A1minus: return "A1minus";
    case DistSqKind::A2: return "A2";
    case DistSqKind::A3transverse: return "A3transverse";
    case DistSqKind::A3nonTransMinus: return "A3nonTransMinus";
    case DistSqKind::A3nonTransPlus: return "A3nonTransPlus";
    case DistSqKind::A4: return "A4";
    case DistSqKind::Worse: return "Worse";
  }
  return "?";
}

struct DistSqVerdict {
  DistSqKind kind = DistSqKind::Worse;
  std::optional<bool> versal;            // empty: not applicable
  std::optional<bool> generic_sections;  // A4 only
  std::optional<bool> morse;             // non-transverse A3 only
  std::optional<bool> beaks;             // non-transverse A3: versal, Morse saddle and A3- sign
  std::map<std::string, std::string> certificates;
};

namespace detail {

template <typename T>
BiPoly<T> monge_height(const MongeT<T>& m)
{
  BiPoly<T> h;
  for (auto& [k, c] : m.a) h.add(k.first, k.second, c);
  return h;
}

template <typename T>
std::map<int, BiPoly<T>> monge_beta_by_s(const MongeT<T>& m)
{
  std::map<int, BiPoly<T>> out;
  for (auto& [k, c] : m.beta) out[std::get<2>(k)].add(std::get<0>(k), std::get<1>(k), c);
  return out;
}

template <typename T>
MongeT<T> substitute(const MongeT<T>& m, const BiPoly<T>& u, const BiPoly<T>& v)
{
  MongeT<T> out;
  out.r0 = m.r0;
  out.r1 = m.r1;
  out.c0 = m.c0;
  const BiPoly<T> h = monge_height(m).compose(u, v);
  for (auto& [k, c] : h.terms()) out.a[k] = c;
  for (auto& [sk, poly] : monge_beta_by_s(m)) {
    const BiPoly<T> b = poly.compose(u, v);
    for (auto& [k, c] : b.terms()) out.beta[{k.first, k.second, sk}] = c;
  }
  return out;
}

template <typename T>
MongeT<T> lift_family(const MongeFamily& m)
{
  MongeT<T> out;
  for (auto& [k, c] : m.a) out.a[k] = T(c);
  for (auto& [k, c] : m.beta) out.beta[k] = T(c);
  out.r0 = T(m.r0);
  out.r1 = T(m.r1);
  if (m.c0) out.c0 = T(*m.c0);
  out.rotated = m.rotated;
  return out;
}

template <typename T>
void check_constant_and_linear(const MongeT<T>& m)
{
  if (sign(m.A(0, 0)) != 0 || sign(m.A(1, 0)) != 0 || sign(m.A(0, 1)) != 0)
    throw std::invalid_argument("Monge height must have zero constant and linear part");
}

}  // namespace detail

/// Rotates (x, y) so that a11 = 0, with the larger principal coefficient on x^2;
/// a quarter turn follows if that leaves a02 = 0. Arithmetic is exact in
/// Q(sqrt(D))(sqrt((1 + C)/2)) with D = (a20 - a02)^2 + a11^2, C = (a20 - a02)/sqrt(D).
inline RotatedMonge normalize_rotation(const MongeFamily& m)
{
  detail::check_constant_and_linear(m);
  const Rational a20 = m.A(2, 0), a11 = m.A(1, 1), a02 = m.A(0, 2);
  const Rational D = (a20 - a02) * (a20 - a02) + a11 * a11;
  if (D == 0) throw UmbilicError("origin is an umbilic point");
  RotatedMonge out;
  if (a11 == 0) {
    out = detail::lift_family<Algebraic>(m);
  } else {
    QuadRational sqrtD = exact_or_symbolic_sqrt(D);
    QuadRational C = QuadRational(a20 - a02) / sqrtD;
    QuadRational S = QuadRational(a11) / sqrtD;
    Algebraic c = exact_or_symbolic_sqrt((QuadRational(1) + C) * QuadRational(Rational(1, 2)));
    Algebraic s = Algebraic(S, nullptr) / (Algebraic(2) * c);
    using P = BiPoly<Algebraic>;
    // x = c X - s Y, y = s X + c Y
    P u = P::x().scaled(c) - P::y().scaled(s);
    P v = P::x().scaled(s) + P::y().scaled(c);
    out = detail::substitute(detail::lift_family<Algebraic>(m), u, v);
    out.a.erase({1, 1});  // exactly zero by construction
  }
  if (sign(out.A(0, 2)) == 0) {
    using P = BiPoly<Algebraic>;
    out = detail::substitute(out, -P::y(), P::x());
  }
  for (auto it = out.a.begin(); it != out.a.end();)
    it = sign(it->second) == 0 ? out.a.erase(it) : std::next(it);
  if (sign(out.A(1, 1)) != 0) throw std::logic_error("rotation failed to clear a11");
  out.rotated = true;
  return out;
}

namespace detail {

template <typename T>
struct MongeInvariants {
  T a20, a02, a03, a12, a21, a13, a04, a05, a22, d;
  T E2, E3;
  explicit MongeInvariants(const MongeT<T>& m)
      : a20(m.A(2, 0)), a02(m.A(0, 2)), a03(m.A(0, 3)), a12(m.A(1, 2)), a21(m.A(2, 1)), a13(m.A(1, 3)), a04(m.A(0, 4)),
        a05(m.A(0, 5)), a22(m.A(2, 2)), d(a02 - a20)
  {
    E2 = a12 * a12 + T(4) * d * (a04 - a02 * a02 * a02);
    E3 = T(4) * d * d * a05 + a12 * (a21 * a12 + T(2) * a13 * a02 - T(2) * a13 * a20);
  }
};

template <typename T>
void require_normalized(const MongeT<T>& m)
{
  check_constant_and_linear(m);
  if (sign(m.A(1, 1)) != 0) throw NotNormalizedError("a11 must vanish; normalize the rotation first");
  if (sign(m.A(0, 2) - m.A(2, 0)) == 0) throw UmbilicError("origin is an umbilic point");
  if (sign(m.A(0, 2)) == 0) throw NotNormalizedError("a02 must be nonzero");
}

}  // namespace detail

/// A_k type at the origin of the distance-squared function from (0, 0, c0).
template <typename T>
DistSqVerdict classify_distance_singularity(const MongeT<T>& m)
{
  detail::require_normalized(m);
  detail::MongeInvariants<T> v(m);
  DistSqVerdict out;
  const T focal = T(1) / (T(2) * v.a02);
  auto& cert = out.certificates;
  cert["a02-a20"] = to_string(v.d);
  if (m.c0 && sign(*m.c0 - focal) != 0) {
    const T c = *m.c0;
    T px = T(1) - T(2) * c * v.a20, py = T(1) - T(2) * c * v.a02;
    cert["c0"] = to_string(c);
    cert["hessian_xx/2"] = to_string(px);
    cert["hessian_yy/2"] = to_string(py);
    if (sign(px) == 0) throw NotNormalizedError("c0 is the focal value of the x direction; rotate a02 onto it");
    out.kind = sign(px) * sign(py) > 0 ? DistSqKind::A1plus : DistSqKind::A1minus;
    return out;
  }
  cert["c0"] = to_string(focal);
  cert["a03"] = to_string(v.a03);
  if (sign(v.a03) != 0) {
    out.kind = DistSqKind::A2;
    return out;
  }
  cert["E2"] = to_string(v.E2);
  cert["a02^3-a04"] = to_string(v.a02 * v.a02 * v.a02 - v.a04);
  if (sign(v.E2) != 0) {
    if (sign(v.a12) == 0)
      out.kind = sign(v.E2) < 0 ? DistSqKind::A3nonTransPlus : DistSqKind::A3nonTransMinus;
    else
      out.kind = DistSqKind::A3transverse;
    cert["A3_sign"] = sign(v.E2) < 0 ? "+" : "-";
    return out;
  }
  cert["E3"] = to_string(v.E3);
  out.kind = sign(v.E3) != 0 ? DistSqKind::A4 : DistSqKind::Worse;
  return out;
}

/// 1-jets in (x, s) of the two equations cutting out S_A3 at the origin.
template <typename T>
struct Sa3Jet {
  T j1x, j1s, j2x, j2s;
  bool regular() const { return sign(determinant()) != 0; }
  T determinant() const { return j1x * j2s - j1s * j2x; }
};

template <typename T>
Sa3Jet<T> sa3_jet(const MongeT<T>& m)
{
  detail::require_normalized(m);
  detail::MongeInvariants<T> v(m);
  const T a02c = v.a02 * v.a02 * v.a02;
  Sa3Jet<T> j;
  j.j1x = T(0) - v.a12;
  j.j1s = T(2) * a02c * m.r1 - m.B(0, 2, 0);
  j.j2x = T(2) * (v.a13 * v.a20 - v.a13 * v.a02 - v.a12 * v.a21);
  j.j2s = T(2) * v.d * (T(2) * v.a02 * v.a02 * m.B(0, 1, 0) - m.B(0, 3, 0)) - v.a12 * m.B(1, 1, 0);
  return j;
}

/// R-versality of the family at an A4 point and genericity of its s-sections.
template <typename T>
DistSqVerdict check_versal_A4(const MongeT<T>& m)
{
  DistSqVerdict out = classify_distance_singularity(m);
  if (out.kind != DistSqKind::A4) throw WrongStratumError(std::string("expected A4, got ") + to_string(out.kind));
  detail::MongeInvariants<T> v(m);
  const T a02c = v.a02 * v.a02 * v.a02;
  const T w = v.a12 * v.a21 + v.a13 * v.d;
  T V = T(4) * a02c * w * m.r1 - T(4) * v.a02 * v.a02 * v.a12 * v.d * m.B(0, 1, 0) + v.a12 * v.a12 * m.B(1, 1, 0) -
        T(2) * w * m.B(0, 2, 0) + T(2) * v.a12 * v.d * m.B(0, 3, 0);
  Sa3Jet<T> j = sa3_jet(m);
  out.versal = sign(V) != 0;
  out.generic_sections = sign(j.j2s) != 0;
  out.certificates["versality_expression"] = to_string(V);
  out.certificates["sections_coefficient"] = to_string(j.j2s);
  out.certificates["jet1"] = to_string(j.j1x) + " x + " + to_string(j.j1s) + " s";
  out.certificates["jet2"] = to_string(j.j2x) + " x + " + to_string(j.j2s) + " s";
  return out;
}

/// Quadratic part Q = qxx x^2 + qxy x y + qyy y^2 of the S_A2 equation at s = 0,
/// and its discriminant Lambda = qxy^2 - 4 qxx qyy.
template <typename T>
struct BeaksQuadratic {
  T qxx, qxy, qyy, discriminant;
};

template <typename T>
BeaksQuadratic<T> beaks_quadratic(const MongeT<T>& m)
{
  detail::MongeInvariants<T> v(m);
  BeaksQuadratic<T> q;
  q.qxx = (T(2) * v.a02 * v.a02 * v.a20 * v.a20 - T(2) * v.a02 * v.a20 * v.a20 * v.a20 - v.a02 * v.a22 + v.a20 * v.a22 - v.a21 * v.a21) / v.d;
  q.qxy = T(0) - T(3) * v.a13;
  q.qyy = T(6) * (v.a02 * v.a02 * v.a02 - v.a04);
  q.discriminant = q.qxy * q.qxy - T(4) * q.qxx * q.qyy;
  return q;
}

/// Versality and Morse condition at a non-transverse A3. The singular set of
/// the s = 0 parallel is a Morse crossing (beaks) when Lambda > 0 and an
/// isolated point (lips) when Lambda < 0.
template <typename T>
DistSqVerdict check_versal_beaks(const MongeT<T>& m)
{
  DistSqVerdict out = classify_distance_singularity(m);
  if (out.kind != DistSqKind::A3nonTransMinus && out.kind != DistSqKind::A3nonTransPlus)
    throw WrongStratumError(std::string("expected non-transverse A3, got ") + to_string(out.kind));
  detail::MongeInvariants<T> v(m);
  T sub = T(2) * v.a02 * v.a02 * v.a02 * m.r1 - m.B(0, 2, 0);
  BeaksQuadratic<T> q = beaks_quadratic(m);
  out.versal = sign(sub) != 0;
  out.morse = sign(q.discriminant) != 0;
  out.beaks = *out.versal && sign(q.discriminant) > 0 && out.kind == DistSqKind::A3nonTransMinus;
  out.certificates["submersion_coefficient"] = to_string(sub);
  out.certificates["Q_xx"] = to_string(q.qxx);
  out.certificates["Q_xy"] = to_string(q.qxy);
  out.certificates["Q_yy"] = to_string(q.qyy);
  out.certificates["Lambda"] = to_string(q.discriminant);
  out.certificates["Sigma_type"] = sign(q.discriminant) > 0 ? "crossing" : (sign(q.discriminant) < 0 ? "isolated_point" : "degenerate");
  return out;
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_VERSALITY_HPP
