#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sphereforge/singularity.hpp"
#include "test_support.hpp"

using namespace sphereforge;
using sftest::square_grid;

namespace {

CauchyData cauchy(std::vector<Rational> b, std::vector<Rational> k) { return {RealPoly(std::move(b)), RealPoly(std::move(k))}; }

SingularityKind exact_kind(const CauchyData& cd, const Rational& x0) { return classify_from_cauchy_data(cd, x0).kind; }

const SurfaceFields& fields_for(const std::string& key)
{
  static std::map<std::string, SurfaceFields> cache;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Potential p;
  if (key == "butterfly-0.2") p = sftest::butterfly_potential(Rational(-1, 5));
  else if (key == "butterfly0") p = sftest::butterfly_potential(0);
  else if (key == "butterfly+0.2") p = sftest::butterfly_potential(Rational(1, 5));
  else if (key == "beaks0") p = sftest::beaks_potential(0);
  else if (key == "unit") p = potential_from_cauchy_data(cauchy({1}, {1}));
  else if (key == "linear") p = potential_from_cauchy_data(cauchy({0, 1}, {1}));
  else if (key == "cone") p = potential_from_cauchy_data(cauchy({}, {1}));
  return cache.emplace(key, run_pipeline(p, square_grid(0.5, 61))).first->second;
}

std::multiset<SingularityKind> kinds(const FieldAnalysis& fa)
{
  std::multiset<SingularityKind> m;
  for (const auto& e : fa.events) m.insert(e.kind);
  return m;
}

double angle_deg(const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
  return std::acos(std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0)) * 180 / std::numbers::pi;
}

}  // namespace

TEST(CauchyClassifier, FigureFourColumns)
{
  EXPECT_EQ(exact_kind(cauchy({0, 1}, {1}), 0), SingularityKind::Swallowtail);
  EXPECT_EQ(exact_kind(cauchy({0, 0, 1}, {1}), 0), SingularityKind::CuspidalButterfly);
  EXPECT_EQ(exact_kind(cauchy({}, {1}), 0), SingularityKind::ConePoint);
  EXPECT_EQ(exact_kind(cauchy({1}, {1}), 0), SingularityKind::CuspidalEdge);
}

TEST(CauchyClassifier, Beaks)
{
  SingularityVerdict v = classify_from_cauchy_data(cauchy({1}, {0, 1}), 0);
  EXPECT_EQ(v.kind, SingularityKind::CuspidalBeaks);
  EXPECT_EQ(v.exact.at("kappa_g"), "0");
  EXPECT_EQ(v.exact.at("kappa_g'"), "1");
  EXPECT_EQ(v.exact.at("b"), "1");
}

TEST(CauchyClassifier, DegenerateCasesAreUnclassified)
{
  EXPECT_EQ(exact_kind(cauchy({0, 0, 0, 1}, {1}), 0), SingularityKind::Unclassified);
  EXPECT_EQ(exact_kind(cauchy({0, 1}, {0, 1}), 0), SingularityKind::Unclassified);
  EXPECT_EQ(exact_kind(cauchy({1}, {0, 0, 1}), 0), SingularityKind::Unclassified);
}

TEST(CauchyClassifier, OffOriginRoot)
{
  // b = x - 1/3 vanishes simply at 1/3; elsewhere an edge.
  CauchyData cd = cauchy({Rational(-1, 3), 1}, {2});
  EXPECT_EQ(exact_kind(cd, Rational(1, 3)), SingularityKind::Swallowtail);
  EXPECT_EQ(exact_kind(cd, Rational(1, 4)), SingularityKind::CuspidalEdge);
}

TEST(CauchyEnumeration, ButterflySweep)
{
  auto minus = enumerate_cauchy_verdicts(cauchy({Rational(-1, 5), 0, 1}, {1}), Rational(-1, 2), Rational(1, 2));
  ASSERT_EQ(minus.size(), 2u);
  for (const auto& v : minus) {
    EXPECT_EQ(v.kind, SingularityKind::Swallowtail);
    EXPECT_NEAR(std::abs(v.x), std::sqrt(0.2), 1e-6);
    Rational lo = parse_rational(v.exact.at("x_lo")), hi = parse_rational(v.exact.at("x_hi"));
    EXPECT_LE(lo * lo, Rational(1, 5) + (lo < 0 ? Rational(1, 1 << 18) : Rational(0)));
  }
  auto zero = enumerate_cauchy_verdicts(cauchy({0, 0, 1}, {1}), Rational(-1, 2), Rational(1, 2));
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].kind, SingularityKind::CuspidalButterfly);
  EXPECT_EQ(zero[0].x, 0.0);
  EXPECT_TRUE(enumerate_cauchy_verdicts(cauchy({Rational(1, 5), 0, 1}, {1}), Rational(-1, 2), Rational(1, 2)).empty());
}

TEST(CauchyEnumeration, MixedZeros)
{
  // b = x (x - 1/4)^2, kappa = x + 1/3: swallowtail at 0, butterfly at 1/4, beaks at -1/3.
  CauchyData cd{RealPoly({0, 1}) * RealPoly({Rational(-1, 4), 1}) * RealPoly({Rational(-1, 4), 1}), RealPoly({Rational(1, 3), 1})};
  auto v = enumerate_cauchy_verdicts(cd, -1, 1);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].kind, SingularityKind::CuspidalBeaks);
  EXPECT_EQ(v[1].kind, SingularityKind::Swallowtail);
  EXPECT_EQ(v[2].kind, SingularityKind::CuspidalButterfly);
  const Rational roots[3] = {Rational(-1, 3), Rational(0), Rational(1, 4)};
  for (int k = 0; k < 3; ++k) {
    EXPECT_LE(parse_rational(v[k].exact.at("x_lo")), roots[k]);
    EXPECT_GE(parse_rational(v[k].exact.at("x_hi")), roots[k]);
    EXPECT_EQ(classify_from_cauchy_data(cd, roots[k]).kind, v[k].kind);
  }
}

TEST(CauchyEnumeration, JointZeroIsUnclassified)
{
  auto v = enumerate_cauchy_verdicts(cauchy({0, 1}, {0, 1}), -1, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, SingularityKind::Unclassified);
}

TEST(WoodAlongCurve, FigureThreeData)
{
  HoloPoly one({ComplexRational(1)}), x({ComplexRational(0), ComplexRational(1)});
  EXPECT_EQ(wood_classify_along_curve(one, one, 0).kind, WoodKind::Fold);
  EXPECT_EQ(wood_classify_along_curve(one, HoloPoly(), 0).kind, WoodKind::Collapse);
  EXPECT_EQ(wood_classify_along_curve(one, x, 0).kind, WoodKind::GoodHigherOrder);
  EXPECT_EQ(wood_classify_along_curve(one, x, Rational(1, 2)).kind, WoodKind::Fold);
  EXPECT_THROW(wood_classify_along_curve(x, one, 0), DegenerateFrameError);
}

TEST(SingularSet, ContainsRealAxisForCauchyData)
{
  const SurfaceFields& s = fields_for("unit");
  SingularCurve c = extract_singular_set(s);
  for (int i = 0; i < s.grid.nx; ++i) EXPECT_LT(distance_to_contour(c.mu_contour, Vec2(s.grid.x(i), 0)), 1e-9) << i;
  EXPECT_LT(distance_to_contour(c.contour, Vec2(0.25, 0)), 0.5 * s.grid.hx());
  EXPECT_LE(c.cross_validation, 1.0);
  EXPECT_FALSE(c.rank0_present);
}

TEST(SingularSet, BeaksContourPassesThroughBasePoint)
{
  // h vanishes along whole grid lines through z0 here, so the polyline only
  // resolves z0 to within a cell; the crossing is located on the node itself.
  const SurfaceFields& s = fields_for("beaks0");
  SingularCurve c = extract_singular_set(s);
  EXPECT_LE(distance_to_contour(c.contour, Vec2(0, 0)), std::hypot(s.grid.hx(), s.grid.hy()));
  ASSERT_FALSE(c.contour.crossings.empty());
  double nearest = 1e9;
  for (const auto& x : c.contour.crossings) nearest = std::min(nearest, x.p.norm());
  EXPECT_LT(nearest, 1e-9);
  EXPECT_LE(c.cross_validation, 1.0);
  for (double r : c.rho) EXPECT_GT(r, 0.0);
}

TEST(SingularSet, EmptyWhenModuliDiffer)
{
  Potential p;
  p.grades[0].b = HoloPoly({ComplexRational(2)});
  p.grades[0].c = HoloPoly({ComplexRational(1)});
  p.grades[1].b = HoloPoly({ComplexRational(-1)});
  p.grades[1].c = HoloPoly({ComplexRational(1)});
  SingularCurve c = extract_singular_set(run_pipeline(p, square_grid(0.1, 11)));
  EXPECT_TRUE(c.contour.vertices.empty());
  EXPECT_TRUE(c.mu_contour.vertices.empty());
}

TEST(FieldClassifier, ButterflySweepVerdicts)
{
  using K = SingularityKind;
  EXPECT_EQ(kinds(analyze_fields(fields_for("butterfly-0.2"))), (std::multiset<K>{K::Swallowtail, K::Swallowtail}));
  EXPECT_EQ(kinds(analyze_fields(fields_for("butterfly0"))), (std::multiset<K>{K::CuspidalButterfly}));
  EXPECT_TRUE(analyze_fields(fields_for("butterfly+0.2")).events.empty());
}

TEST(FieldClassifier, SwallowtailLocations)
{
  FieldAnalysis fa = analyze_fields(fields_for("butterfly-0.2"));
  ASSERT_EQ(fa.events.size(), 2u);
  for (const auto& e : fa.events) {
    EXPECT_NEAR(std::abs(e.x), std::sqrt(0.2), 1.0 / 60);
    EXPECT_NEAR(e.y, 0.0, 1e-9);
  }
}

TEST(FieldClassifier, EdgeEverywhereWhenBNeverVanishes)
{
  const SurfaceFields& s = fields_for("butterfly+0.2");
  FieldAnalysis fa = analyze_fields(s);
  int j0 = s.grid.ny / 2;
  for (int i = 3; i < s.grid.nx - 3; ++i) EXPECT_EQ(classify_frontal_point(s, fa, i, j0).kind, SingularityKind::CuspidalEdge) << i;
  EXPECT_GT(fa.edge_vertices, 0);
}

TEST(FieldClassifier, BeaksHessianCertificate)
{
  const SurfaceFields& s = fields_for("beaks0");
  FieldAnalysis fa = analyze_fields(s);
  SingularityVerdict v = classify_frontal_point(s, fa, s.grid.nx / 2, s.grid.ny / 2);
  EXPECT_EQ(v.kind, SingularityKind::CuspidalBeaks);
  EXPECT_LT(v.numeric.at("det_hess_mu"), 0.0);
  EXPECT_EQ(fa.curve.mu_contour.topology.crossings, 1);
}

TEST(FieldClassifier, AgreesWithExactOnFigureFourRuns)
{
  struct Case {
    const char* key;
    CauchyData cd;
  };
  for (const auto& c : {Case{"linear", cauchy({0, 1}, {1})}, Case{"butterfly0", cauchy({0, 0, 1}, {1})}, Case{"cone", cauchy({}, {1})},
                        Case{"beaks0", cauchy({1}, {0, 1})}}) {
    const SurfaceFields& s = fields_for(c.key);
    FieldAnalysis fa = analyze_fields(s);
    SingularityVerdict v = classify_frontal_point(s, fa, s.grid.nx / 2, s.grid.ny / 2);
    EXPECT_EQ(v.kind, classify_from_cauchy_data(c.cd, 0).kind) << c.key;
  }
}

TEST(FieldClassifier, NoLipsOrD4Signatures)
{
  for (const char* key : {"butterfly-0.2", "butterfly0", "butterfly+0.2", "beaks0", "unit", "linear", "cone"}) {
    FieldAnalysis fa = analyze_fields(fields_for(key));
    EXPECT_EQ(fa.lips_signatures, 0) << key;
    EXPECT_EQ(fa.d4_signatures, 0) << key;
  }
}

TEST(FieldClassifier, RankZeroIsNotAFront)
{
  // b0 = c0 = z vanish at the base point, so dN(0) = 0.
  Potential p;
  p.grades[0].b = HoloPoly({ComplexRational(0), ComplexRational(1)});
  p.grades[0].c = HoloPoly({ComplexRational(0), ComplexRational(2)});
  p.grades[1].b = HoloPoly({ComplexRational(1)});
  p.grades[1].c = HoloPoly({ComplexRational(1)});
  EXPECT_EQ(rank_at_basepoint(p), BaseRank::Rank0);
  SurfaceFields s = run_pipeline(p, square_grid(0.1, 21));
  EXPECT_EQ(classify_frontal_point(s, 10, 10).kind, SingularityKind::NotAFront);
}

TEST(NullDirections, OrthogonalKernels)
{
  const SurfaceFields& s = fields_for("unit");
  int j0 = s.grid.ny / 2;
  for (int i = 5; i < s.grid.nx - 5; i += 5) {
    NullDirections d = null_directions(s, i, j0);
    EXPECT_NEAR(angle_deg(d.eta_f, d.eta_N), 90.0, 1.0) << i;
  }
}

TEST(NullDirections, UnitSpeedDatum)
{
  // |eta_f| along (1, -b) with b = 1 in this frame convention.
  const SurfaceFields& s = fields_for("unit");
  NullDirections d = null_directions(s, s.grid.nx / 2 + 6, s.grid.ny / 2);
  EXPECT_LT(angle_deg(d.eta_f, Eigen::Vector2d(1, -1)), 1.0);
}

TEST(NullDirections, SwallowtailIsTangent)
{
  const SurfaceFields& s = fields_for("linear");
  NullDirections d = null_directions(s, s.grid.nx / 2, s.grid.ny / 2);
  EXPECT_LT(angle_deg(d.eta_f, Eigen::Vector2d(1, 0)), 1.0);
}

TEST(NullDirections, RegularPointThrows)
{
  const SurfaceFields& s = fields_for("unit");
  EXPECT_THROW(null_directions(s, 30, 50), RankError);
}

TEST(MorseTransition, PairingSwap)
{
  // Four endpoints E, N, W, S; before: {E,N} {W,S}; after: {E,S} {N,W}.
  const double pi = std::numbers::pi;
  ContourTopology minus, zero, plus;
  minus.endpoint_angles = plus.endpoint_angles = zero.endpoint_angles = {0, pi / 2, pi, 3 * pi / 2};
  minus.endpoint_component = {0, 0, 1, 1};
  plus.endpoint_component = {0, 1, 1, 0};
  zero.endpoint_component = {0, 0, 0, 0};
  zero.crossings = 1;
  EXPECT_TRUE(morse_transition(minus, zero, plus).holds());
  EXPECT_FALSE(morse_transition(minus, zero, minus).holds());
  zero.crossings = 0;
  EXPECT_FALSE(morse_transition(minus, zero, plus).holds());
}

TEST(MorseTransition, BeaksFamily)
{
  SurfaceFields m = run_pipeline(sftest::beaks_potential(Rational(-1, 10)), square_grid(0.5, 61));
  SurfaceFields p = run_pipeline(sftest::beaks_potential(Rational(1, 10)), square_grid(0.5, 61));
  const auto& z = fields_for("beaks0");
  auto tm = extract_singular_set(m).mu_contour.topology, tz = extract_singular_set(z).mu_contour.topology,
       tp = extract_singular_set(p).mu_contour.topology;
  EXPECT_EQ(tm.components, 2);
  EXPECT_EQ(tz.components, 1);
  EXPECT_EQ(tz.crossings, 1);
  EXPECT_EQ(tp.components, 2);
  EXPECT_TRUE(morse_transition(tm, tz, tp).holds());
}
