#ifndef SPHEREFORGE_QUAD_EXT_HPP
#define SPHEREFORGE_QUAD_EXT_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "sphereforge/rational.hpp"

namespace sphereforge {

/// Exact square root of a non-negative rational, if it has one.
inline std::optional<Rational> exact_sqrt(const Rational& q)
{
  if (q < 0) return std::nullopt;
  BigInt n = boost::multiprecision::numerator(q), d = boost::multiprecision::denominator(q);
  BigInt rn = boost::multiprecision::sqrt(n), rd = boost::multiprecision::sqrt(d);
  if (rn * rn != n || rd * rd != d) return std::nullopt;
  return Rational(rn, rd);
}

/// Element p + q*sqrt(m) of a real quadratic extension F(sqrt(m)), m > 0 in F.
/// Elements with q = 0 mix freely with any radicand.
template <typename F>
class QuadExt {
 public:
  QuadExt() : p_(0), q_(0), m_(0) {}
  QuadExt(int v) : p_(v), q_(0), m_(0) {}  // NOLINT: implicit lift from the base field
  QuadExt(const Rational& v) : p_(v), q_(0), m_(0) {}  // NOLINT
  QuadExt(const F& v, std::nullptr_t) : p_(v), q_(0), m_(0) {}
  QuadExt(const F& p, const F& q, const F& m) : p_(p), q_(q), m_(m)
  {
    if (sign(m_) <= 0 && sign(q_) != 0) throw std::domain_error("radicand must be positive");
    if (sign(q_) == 0) m_ = F(0);
  }
  /// sqrt(m) exactly.
  static QuadExt sqrt_of(const F& m) { return QuadExt(F(0), F(1), m); }

  const F& p() const { return p_; }
  const F& q() const { return q_; }
  const F& m() const { return m_; }
  bool in_base() const { return sign(q_) == 0; }

  QuadExt operator+(const QuadExt& o) const
  {
    return QuadExt(p_ + o.p_, q_ + o.q_, radicand(o));
  }
  QuadExt operator-() const { return QuadExt(F(0) - p_, F(0) - q_, m_); }
  QuadExt operator-(const QuadExt& o) const { return *this + (-o); }
  QuadExt operator*(const QuadExt& o) const
  {
    F m = radicand(o);
    return QuadExt(p_ * o.p_ + q_ * o.q_ * m, p_ * o.q_ + q_ * o.p_, m);
  }
  QuadExt inverse() const
  {
    F n = p_ * p_ - q_ * q_ * m_;
    if (sign(n) == 0) throw std::domain_error("division by zero in quadratic extension");
    F inv = F(1) / n;
    return QuadExt(p_ * inv, (F(0) - q_) * inv, m_);
  }
  QuadExt operator/(const QuadExt& o) const { return *this * o.inverse(); }
  QuadExt& operator+=(const QuadExt& o) { return *this = *this + o; }
  QuadExt& operator-=(const QuadExt& o) { return *this = *this - o; }
  QuadExt& operator*=(const QuadExt& o) { return *this = *this * o; }
  bool operator==(const QuadExt& o) const { return sign(*this - o) == 0; }
  bool operator!=(const QuadExt& o) const { return !(*this == o); }

  friend int sign(const QuadExt& a)
  {
    int sp = sign(a.p_), sq = sign(a.q_);
    if (sq == 0) return sp;
    if (sp == 0 || sp == sq) return sq;
    // Opposite signs: compare p^2 with q^2 m.
    int d = sign(a.p_ * a.p_ - a.q_ * a.q_ * a.m_);
    return sp * d;
  }
  friend double to_double(const QuadExt& a) { return to_double(a.p_) + to_double(a.q_) * std::sqrt(to_double(a.m_)); }
  friend std::string to_string(const QuadExt& a)
  {
    if (a.in_base()) return to_string(a.p_);
    std::string s = sign(a.p_) == 0 ? "" : "(" + to_string(a.p_) + ") + ";
    return s + "(" + to_string(a.q_) + ")*sqrt(" + to_string(a.m_) + ")";
  }

 private:
  F radicand(const QuadExt& o) const
  {
    if (in_base()) return o.m_;
    if (o.in_base()) return m_;
    if (sign(m_ - o.m_) != 0) throw std::domain_error("mixed radicands in quadratic extension");
    return m_;
  }
  F p_, q_, m_;
};

using QuadRational = QuadExt<Rational>;
/// Tower Q(sqrt(m1))(sqrt(m2)): exact field of the cosine and sine of a
/// half angle whose double-angle cosine lies in Q(sqrt(m1)).
using Algebraic = QuadExt<QuadRational>;

/// Exact sqrt of a non-negative element, collapsing to the base field when
/// the radicand is a perfect rational square.
inline QuadRational exact_or_symbolic_sqrt(const Rational& m)
{
  if (auto r = exact_sqrt(m)) return QuadRational(*r);
  return QuadRational::sqrt_of(m);
}

inline Algebraic exact_or_symbolic_sqrt(const QuadRational& m)
{
  if (m.in_base())
    if (auto r = exact_sqrt(m.p())) return Algebraic(QuadRational(*r), nullptr);
  return Algebraic::sqrt_of(m);
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_QUAD_EXT_HPP
