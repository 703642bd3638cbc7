#ifndef SPHEREFORGE_POTENTIAL_HPP
#define SPHEREFORGE_POTENTIAL_HPP

#include <map>
#include <utility>
#include <vector>

#include "sphereforge/loop.hpp"
#include "sphereforge/polynomial.hpp"
#include "sphereforge/rational.hpp"

namespace sphereforge {

/// Entries of one grade n: a_n on the diagonal at lambda^{2n}, b_n and c_n
/// off the diagonal at lambda^{2n-1}.
struct Grade {
  HoloPoly a, b, c;
};

struct Potential {
  std::map<int, Grade> grades;  // n >= 0
  ComplexRational base_point;

  bool is_zero() const
  {
    for (const auto& [n, g] : grades)
      if (!g.a.is_zero() || !g.b.is_zero() || !g.c.is_zero()) return false;
    return true;
  }
  /// Largest |power| of lambda that appears.
  int loop_degree() const
  {
    int d = 1;
    for (const auto& [n, g] : grades) {
      if (!g.a.is_zero()) d = std::max(d, 2 * n);
      if (!g.b.is_zero() || !g.c.is_zero()) d = std::max(d, std::abs(2 * n - 1));
    }
    return d;
  }
};

struct CauchyData {
  RealPoly b;
  RealPoly kappa_g;
};

inline Potential potential_from_cauchy_data(const CauchyData& data, const ComplexRational& base_point = {})
{
  const HoloPoly b = HoloPoly::from_real(data.b);
  const HoloPoly k = HoloPoly::from_real(data.kappa_g);
  const HoloPoly one = HoloPoly::constant(1);
  const HoloPoly ib = kImaginaryUnit * b;
  Potential p;
  p.base_point = base_point;
  Grade& g0 = p.grades[0];
  g0.a = ComplexRational(0, 2) * k;
  g0.b = ComplexRational(-1) * one + ComplexRational(-1) * ib;
  g0.c = one + ib;
  Grade& g1 = p.grades[1];
  g1.b = ComplexRational(-1) * one + ib;
  g1.c = one + ComplexRational(-1) * ib;
  return p;
}

/// Adds s lambda^{-1} to the upper off-diagonal entry.
inline Potential add_perturbation(Potential p, const Rational& s)
{
  Grade& g0 = p.grades[0];
  g0.b = g0.b + HoloPoly::constant(ComplexRational(s));
  return p;
}

inline std::pair<ComplexRational, ComplexRational> lowest_order_pair(const Potential& p, const ComplexRational& z)
{
  auto it = p.grades.find(0);
  if (it == p.grades.end()) return {};
  return {it->second.b(z), it->second.c(z)};
}

/// Twisted loop A(z) with coefficients at lambda^{-1}, lambda^0, ...
inline LaurentLoop evaluate_A(const Potential& p, cplx z)
{
  LaurentLoop out(p.loop_degree(), Parity::Twisted);
  for (const auto& [n, g] : p.grades) {
    cplx a = NumericPoly(g.a)(z);
    out[2 * n](0, 0) += a;
    out[2 * n](1, 1) -= a;
    out[2 * n - 1](0, 1) += NumericPoly(g.b)(z);
    out[2 * n - 1](1, 0) += NumericPoly(g.c)(z);
  }
  return out;
}

/// Floating-point copy of a potential for the integrator: each term is
/// (power of lambda, polynomial for the first slot, polynomial for the second).
/// Even powers are diagonal (slots 00, 11), odd powers off-diagonal (01, 10).
struct NumericPotential {
  struct Term {
    int power;
    NumericPoly first, second;
    bool negate_second;
  };
  std::vector<Term> terms;
  NumericPoly b0, c0;

  explicit NumericPotential(const Potential& p)
  {
    for (const auto& [n, g] : p.grades) {
      if (!g.a.is_zero()) terms.push_back({2 * n, NumericPoly(g.a), NumericPoly(g.a), true});
      if (!g.b.is_zero() || !g.c.is_zero()) terms.push_back({2 * n - 1, NumericPoly(g.b), NumericPoly(g.c), false});
    }
    if (auto it = p.grades.find(0); it != p.grades.end()) {
      b0 = NumericPoly(it->second.b);
      c0 = NumericPoly(it->second.c);
    }
  }
};

}  // namespace sphereforge

#endif  // SPHEREFORGE_POTENTIAL_HPP
