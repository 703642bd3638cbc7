#include <gtest/gtest.h>

#include "sphereforge/potential.hpp"
#include "test_support.hpp"

using namespace sphereforge;

namespace {

ComplexRational cq(int re, int im) { return {Rational(re), Rational(im)}; }

}  // namespace

TEST(CauchyPotential, BeaksDatum)
{
  Potential p = potential_from_cauchy_data({RealPoly({1}), RealPoly({0, 1})});
  const Grade& g0 = p.grades.at(0);
  EXPECT_EQ(g0.b, HoloPoly({cq(-1, -1)}));
  EXPECT_EQ(g0.c, HoloPoly({cq(1, 1)}));
  EXPECT_EQ(g0.a, HoloPoly({cq(0, 0), cq(0, 2)}));
  const Grade& g1 = p.grades.at(1);
  EXPECT_EQ(g1.b, HoloPoly({cq(-1, 1)}));
  EXPECT_EQ(g1.c, HoloPoly({cq(1, -1)}));
  EXPECT_TRUE(g1.a.is_zero());
  EXPECT_EQ(p.grades.size(), 2u);
}

TEST(CauchyPotential, ButterflyFamily)
{
  Rational s(-1, 5);
  Potential p = sftest::butterfly_potential(s);
  // b0(z) = -1 - i(s + z^2)
  EXPECT_EQ(p.grades.at(0).b, HoloPoly({ComplexRational(Rational(-1), Rational(-s)), cq(0, 0), cq(0, -1)}));
}

TEST(CauchyPotential, ConeDatum)
{
  Potential p = potential_from_cauchy_data({RealPoly(), RealPoly({1})});
  EXPECT_EQ(p.grades.at(0).b, HoloPoly({cq(-1, 0)}));
  EXPECT_EQ(p.grades.at(0).c, HoloPoly({cq(1, 0)}));
}

TEST(CauchyPotential, EqualModuliOnRealAxis)
{
  CauchyData cd{RealPoly({Rational(1, 3), -2, 0, 5}), RealPoly({2, 1})};
  Potential p = potential_from_cauchy_data(cd);
  for (int k = -6; k <= 6; ++k) {
    auto [b, c] = lowest_order_pair(p, ComplexRational(Rational(k, 4)));
    EXPECT_EQ(b.norm(), c.norm());
    EXPECT_EQ(b.norm(), 1 + cd.b(Rational(k, 4)) * cd.b(Rational(k, 4)));
  }
}

TEST(CauchyPotential, OffDiagonalLinearInB)
{
  RealPoly k({1, 1});
  RealPoly b1({0, 1}), b2({2, 0, -1});
  Potential p1 = potential_from_cauchy_data({b1, k}), p2 = potential_from_cauchy_data({b2, k});
  Potential p12 = potential_from_cauchy_data({b1 + b2, k}), p0 = potential_from_cauchy_data({RealPoly(), k});
  for (int n : {0, 1}) {
    // p(b1 + b2) - p(0) = (p(b1) - p(0)) + (p(b2) - p(0))
    HoloPoly lhs = p12.grades[n].b + ComplexRational(-1) * p0.grades[n].b;
    HoloPoly rhs = p1.grades[n].b + p2.grades[n].b + ComplexRational(-2) * p0.grades[n].b;
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Perturbation, BeaksFamily)
{
  Rational s(3, 10);
  Potential p = sftest::beaks_potential(s);
  auto [b, c] = lowest_order_pair(p, ComplexRational(Rational(7, 3), Rational(-1, 2)));
  EXPECT_EQ(b, ComplexRational(Rational(s - 1), Rational(-1)));
  EXPECT_EQ(c, cq(1, 1));
}

TEST(Perturbation, ZeroIsIdentity)
{
  Potential p = sftest::beaks_potential(0);
  Potential q = add_perturbation(p, 0);
  EXPECT_EQ(p.grades.at(0).b, q.grades.at(0).b);
  EXPECT_EQ(p.grades.at(1).c, q.grades.at(1).c);
}

TEST(Perturbation, Additive)
{
  Potential p = sftest::butterfly_potential(0);
  Potential a = add_perturbation(p, Rational(1, 3) + Rational(-2, 7));
  Potential b = add_perturbation(add_perturbation(p, Rational(1, 3)), Rational(-2, 7));
  EXPECT_EQ(a.grades.at(0).b, b.grades.at(0).b);
}

TEST(LowestOrderPair, ZeroPotentialIsRankZeroSignature)
{
  Potential p;
  auto [b, c] = lowest_order_pair(p, cq(1, 1));
  EXPECT_TRUE(b.is_zero());
  EXPECT_TRUE(c.is_zero());
}

TEST(LowestOrderPair, UnitSpeedDatumAtOrigin)
{
  Potential p = potential_from_cauchy_data({RealPoly({1}), RealPoly({1})});
  auto [b, c] = lowest_order_pair(p, ComplexRational());
  EXPECT_EQ(b, cq(-1, -1));
  EXPECT_EQ(c, cq(1, 1));
  EXPECT_EQ(b.norm(), Rational(2));
}

TEST(EvaluateA, ZeroPotential)
{
  LaurentLoop l = evaluate_A(Potential{}, cplx(0.3, 0.1));
  for (int n = -l.degree(); n <= l.degree(); ++n) EXPECT_TRUE(l[n].isZero(0));
}

TEST(EvaluateA, CauchyPotentialHasPowersMinusOneToOne)
{
  Potential p = sftest::butterfly_potential(Rational(1, 2));
  LaurentLoop l = evaluate_A(p, cplx(0.2, -0.4));
  for (int n = -l.degree(); n <= l.degree(); ++n)
    if (std::abs(n) > 1) EXPECT_TRUE(l[n].isZero(0)) << n;
  EXPECT_FALSE(l[-1].isZero(0));
  EXPECT_FALSE(l[0].isZero(0));
  EXPECT_FALSE(l[1].isZero(0));
}

TEST(EvaluateA, MatchesDisplayedMatrixAtLambdaOne)
{
  // b(x) = 1 + x, kappa = 2 - x at z: the displayed matrix with lambda = 1.
  const cplx z(0.3, 0.7), i(0, 1);
  Potential p = potential_from_cauchy_data({RealPoly({1, 1}), RealPoly({2, -1})});
  Mat2 sum = loop_eval(evaluate_A(p, z), 1.0);
  cplx b = 1.0 + z, k = 2.0 - z;
  Mat2 expect;
  expect << 2.0 * k * i, (-1.0 - i * b) + (-1.0 + i * b), (1.0 + i * b) + (1.0 - i * b), -2.0 * k * i;
  EXPECT_LT((sum - expect).norm(), 1e-14);
}

TEST(EvaluateA, IsTwisted)
{
  Potential p;
  p.grades[2].a = HoloPoly({cq(1, 0)});
  p.grades[2].b = HoloPoly({cq(0, 1)});
  LaurentLoop l = evaluate_A(p, cplx(0.1, 0));
  EXPECT_EQ(p.loop_degree(), 4);
  EXPECT_NEAR(l[4](0, 0).real(), 1.0, 0);
  EXPECT_NEAR(l[4](1, 1).real(), -1.0, 0);
  EXPECT_NEAR(l[3](0, 1).imag(), 1.0, 0);
}
