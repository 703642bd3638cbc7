// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any of them fails.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "sphereforge/germ.hpp"
#include "sphereforge/runner.hpp"
#include "sphereforge/versality.hpp"
#include "sa3_oracle.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace sphereforge;
using sftest::square_grid;

namespace {

const fs::path kConfigs = SPHEREFORGE_CONFIGS;

struct Outcome {
  bool ok = true;
  std::ostringstream why;
  void require(bool cond, const std::string& what)
  {
    if (!cond) {
      ok = false;
      why << " [" << what << "]";
    }
  }
};

int failures = 0;

template <class F>
void criterion(int n, const char* title, F&& body)
{
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  if (!o.ok) ++failures;
  std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << n << ": " << title << o.why.str() << std::endl;
}

fs::path scratch(const std::string& name)
{
  fs::path p = fs::temp_directory_path() / ("sphereforge_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load(const std::string& name, const fs::path& out)
{
  RunConfig cfg = parse_run_config(load_json_file((kConfigs / name).string()));
  cfg.output_dir = out.string();
  return cfg;
}

std::string fmt(double v)
{
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

double max_of(const std::vector<double>& v)
{
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

struct TestPotential {
  const char* name;
  Potential p;
};

const std::vector<TestPotential>& potentials()
{
  static const std::vector<TestPotential> v{{"butterfly", sftest::butterfly_potential(0)}, {"beaks", sftest::beaks_potential(0)}};
  return v;
}

// 61x61 degree-16 runs are shared by the first three checks.
const SurfaceFields& base_run(std::size_t k)
{
  static std::map<std::size_t, SurfaceFields> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, run_pipeline(potentials()[k].p, square_grid(0.5, 61))).first;
  return it->second;
}

std::vector<SweepEntry> sweep_entries;

}  // namespace

int main()
{
  criterion(1, "loop-group splitting accuracy and degree convergence", [](Outcome& o) {
    for (std::size_t k = 0; k < potentials().size(); ++k) {
      const SurfaceFields& s = base_run(k);
      const std::string name = potentials()[k].name;
      o.require(std::all_of(s.valid.begin(), s.valid.end(), [](char c) { return c != 0; }), name + ": flagged nodes");
      double rec16 = max_of(s.recomposition_error), uni16 = max_of(s.unitarity_error);
      o.require(rec16 <= 1e-6, name + ": recomposition " + fmt(rec16));
      o.require(uni16 <= 1e-8, name + ": unitarity " + fmt(uni16));
      PipelineOptions low;
      low.degree = 8;
      low.tol_det = 1e-3;
      low.tol_recomp = 1.0;
      low.tol_unit = 1.0;
      double rec8 = max_of(run_pipeline(potentials()[k].p, square_grid(0.5, 61), low).recomposition_error);
      o.require(rec8 >= 10 * rec16, name + ": d=8 error " + fmt(rec8) + " vs d=16 " + fmt(rec16));
    }
  });

  criterion(2, "harmonicity residual decays at second order", [](Outcome& o) {
    for (std::size_t k = 0; k < potentials().size(); ++k) {
      double r31 = harmonicity_residual(run_pipeline(potentials()[k].p, square_grid(0.5, 31)));
      double r61 = harmonicity_residual(base_run(k));
      double r121 = harmonicity_residual(run_pipeline(potentials()[k].p, square_grid(0.5, 121)));
      for (double ratio : {r31 / r61, r61 / r121})
        o.require(ratio >= 3 && ratio <= 5, std::string(potentials()[k].name) + ": ratio " + fmt(ratio));
    }
  });

  criterion(3, "Gauss curvature one and companion mean curvature one half", [](Outcome& o) {
    for (std::size_t k = 0; k < potentials().size(); ++k) {
      const SurfaceFields& s = base_run(k);
      const std::string name = potentials()[k].name;
      double worst_K = 0, worst_H = 0;
      int nK = 0, nH = 0;
      for (double K : gauss_curvature(s, 0.1))
        if (std::isfinite(K)) {
          worst_K = std::max(worst_K, std::abs(K - 1));
          ++nK;
        }
      for (double H : cmc_companion(s).H)
        if (std::isfinite(H)) {
          worst_H = std::max(worst_H, std::abs(std::abs(H) - 0.5));
          ++nH;
        }
      o.require(nK > 0 && worst_K <= 1e-3, name + ": |K-1| " + fmt(worst_K));
      o.require(nH > 0 && worst_H <= 1e-3, name + ": ||H|-1/2| " + fmt(worst_H));
    }
  });

  criterion(4, "exact base-point rank matches numerical rank of dN", [](Outcome& o) {
    std::mt19937 rng(11);
    DomainGrid g = square_grid(0.1, 11);
    int agree = 0;
    const int trials = 24;
    for (int t = 0; t < trials; ++t) {
      auto r = sftest::random_generic_potential(rng, t % 2 == 0);
      Eigen::Vector2d sv = sftest::dN_singular_values_at_center(run_pipeline(r.p, g));
      bool numeric_degenerate = sv(1) < 1e-4 * sv(0);
      bool exact_degenerate = rank_at_basepoint(r.p) != BaseRank::Rank2;
      if (numeric_degenerate == exact_degenerate) ++agree;
    }
    o.require(agree == trials, std::to_string(agree) + "/" + std::to_string(trials));
  });

  criterion(5, "butterfly sweep verdict multisets and exact/field agreement", [](Outcome& o) {
    std::ostringstream log;
    SweepReport rep = run_sweep(load("butterfly_sweep.json", scratch("butterfly")), log);
    o.require(rep.complete, "incomplete run");
    o.require(rep.counts_ok.value_or(false), "verdict counts");
    o.require(rep.agreement_ok, "exact/field agreement");
    int certified = 0;
    for (auto& e : rep.entries) {
      certified += e.agreement.certified;
      sweep_entries.push_back(e);
    }
    o.require(certified > 0, "no certified points compared");
  });

  criterion(6, "beaks sweep Morse transition and certificates", [](Outcome& o) {
    std::ostringstream log;
    SweepReport rep = run_sweep(load("beaks_sweep.json", scratch("beaks")), log);
    o.require(rep.complete, "incomplete run");
    o.require(rep.morse && rep.morse->holds(), "Morse transition");
    for (auto& e : rep.entries) sweep_entries.push_back(e);
    CauchyData cd{RealPoly({1}), RealPoly({0, 1})};
    SingularityVerdict v = classify_from_cauchy_data(cd, Rational(0));
    o.require(v.exact.at("kappa_g") == "0", "kappa_g(0)");
    o.require(v.exact.at("kappa_g'") == "1", "kappa_g'(0)");
    o.require(v.exact.at("b") == "1", "b(0)");
    o.require(v.kind == SingularityKind::CuspidalBeaks, "verdict");
  });

  criterion(7, "no lips or D4 signature in any shipped run", [](Outcome& o) {
    int lips = 0, d4 = 0;
    for (const char* name : {"b_zero.json", "b_linear.json", "b_one.json", "b_square.json"}) {
      RunConfig cfg = load(name, scratch("neg"));
      SurfaceRun r = run_surface(cfg.potential_for(0, 0), cfg.grid, cfg.pipeline, cfg.singularity, cfg.cauchy);
      lips += r.analysis.lips_signatures;
      d4 += r.analysis.d4_signatures;
    }
    o.require(sweep_entries.size() == 6, "sweep entries missing");
    for (const auto& e : sweep_entries) {
      lips += e.lips;
      d4 += e.d4;
    }
    o.require(lips == 0, "lips " + std::to_string(lips));
    o.require(d4 == 0, "D4 " + std::to_string(d4));
  });

  criterion(8, "versality conditions, jet independence and Newton oracle", [](Outcome& o) {
    using sftest::q;
    DistSqVerdict a4 = check_versal_A4(sftest::a4_instance());
    o.require(a4.kind == DistSqKind::A4 && a4.versal.value_or(false), "A4 instance versal");
    o.require(a4.certificates.at("versality_expression") == "-1/4", "A4 expression");

    DistSqVerdict b = check_versal_beaks(sftest::nontransverse_a3());
    o.require(b.versal.value_or(false) && b.certificates.at("submersion_coefficient") == "1/4", "beaks submersion");
    o.require(b.certificates.at("Q_xx") == "1" && b.certificates.at("Q_xy") == "0" && b.certificates.at("Q_yy") == "3/4", "beaks Hessian");
    o.require(b.certificates.at("Lambda") == "-3" && b.certificates.at("Sigma_type") == "isolated_point", "beaks discriminant");

    MongeFamily crossing = sftest::nontransverse_a3();
    crossing.a[{1, 3}] = 1;
    DistSqVerdict c = check_versal_beaks(crossing);
    o.require(c.certificates.at("Lambda") == "6" && c.certificates.at("Sigma_type") == "crossing", "beaks crossing instance");

    std::mt19937 rng(2024);
    int agree = 0, versal = 0;
    for (int t = 0; t < 100; ++t) {
      MongeFamily m = sftest::random_a4(rng);
      if (t % 4 == 0) sftest::force_zero_expression(m);
      bool v = check_versal_A4(m).versal.value_or(false);
      if (sa3_jet(m).regular() == v) ++agree;
      versal += v;
    }
    o.require(agree == 100, "independence vs versality " + std::to_string(agree) + "/100");
    o.require(versal > 0 && versal < 100, "both outcomes sampled");

    MongeFamily m;
    m.a[{2, 0}] = 1;
    m.a[{0, 2}] = q(1, 2);
    m.a[{1, 2}] = q(1, 2);
    m.a[{2, 1}] = q(1, 3);
    m.a[{1, 3}] = q(-1, 2);
    m.a[{0, 4}] = q(1, 8) - q(1, 4) * q(1, 4) / (q(1, 2) - 1);
    m.a[{0, 5}] = q(2, 3);
    m.r1 = q(3, 2);
    m.beta[{0, 1, 0}] = q(1, 2);
    m.beta[{0, 2, 0}] = q(-1, 3);
    m.beta[{0, 3, 0}] = q(1, 4);
    m.beta[{1, 1, 0}] = q(2, 5);
    Sa3Jet<Rational> j = sa3_jet(m);
    sftest::NumericFamily nf = sftest::numeric(m, 1.0);
    const double h = 1e-4;
    auto at = [&](double x, double s) {
      Eigen::Vector3d seed(0, 0, 1.0);
      return nf.reduced(x, 0, s, seed);
    };
    Eigen::Vector2d dx = (at(h, 0) - at(-h, 0)) / (2 * h), ds = (at(0, h) - at(0, -h)) / (2 * h);
    double e1 = sftest::misalignment({dx(0), ds(0)}, {to_double(j.j1x), to_double(j.j1s)});
    double e2 = sftest::misalignment({dx(1), ds(1)}, {to_double(j.j2x), to_double(j.j2s)});
    o.require(e1 < 1e-6 && e2 < 1e-6, "Newton jets misaligned " + fmt(e1) + ", " + fmt(e2));
  });

  criterion(9, "germ classifier golden table", [](Outcome& o) {
    using CQ = ComplexRational;
    auto mono = [](int n, CQ c) {
      std::vector<CQ> v(static_cast<std::size_t>(n) + 1);
      v[static_cast<std::size_t>(n)] = c;
      return HoloPoly(std::move(v));
    };
    const CQ one(Rational(1)), i(Rational(0), Rational(1));
    const HoloPoly x = mono(1, one), xy = mono(2, CQ(Rational(0), Rational(-1, 2)));
    auto orbit = [](const GermClassification& c) { return c.orbit.value_or("?"); };

    GermClassification fold = recognize_orbit({x, mono(2, one), -1});
    o.require(orbit(fold) == "fold (x,y^2)", "fold");
    GermClassification beaks = recognize_orbit({x, mono(3, i), -1});
    o.require(orbit(beaks) == "beaks (x,y^3-x^2y)" && beaks.realizable == Tristate::Yes && beaks.versal_by_harmonic == Tristate::Yes,
              "beaks");
    o.require(orbit(recognize_orbit({mono(2, one), xy, 2})) == "(x^2-y^2,xy)", "(x^2-y^2,xy)");
    o.require(orbit(recognize_orbit({mono(5, one), xy, -1})) == "(0,xy)", "(0,xy)");
    o.require(orbit(recognize_orbit({mono(3, one), mono(3, i), -1})) == "(0,0)", "(0,0)");
    GermClassification i22 = recognize_orbit({mono(2, one) + mono(3, one), xy, 3});
    o.require(orbit(i22) == "I^1_{2,2}" && i22.versal_by_harmonic == Tristate::Yes, "I^1_{2,2}");
    o.require(!versal_dimension_possible(VersalKind::Rank1KJetX0, 5) && versal_dimension_possible(VersalKind::Rank1KJetX0, 4),
              "rank-1 k=5");
    o.require(!versal_dimension_possible(VersalKind::BranchLike, 7), "branch k=7 table");
    o.require(recognize_orbit({mono(7, one), xy, -1}).versal_by_harmonic == Tristate::No, "branch k=7 germ");
  });

  criterion(10, "repeated builds are byte-identical", [](Outcome& o) {
    std::ostringstream log;
    fs::path a = scratch("det_a"), b = scratch("det_b");
    o.require(run_build(load("b_square.json", a), log) == 0, "first build");
    o.require(run_build(load("b_square.json", b), log) == 0, "second build");
    for (const char* f : {"surface.obj", "fields.json", "report.json"}) {
      std::string x = slurp(a / f), y = slurp(b / f);
      o.require(!x.empty() && x == y, f);
    }
  });

  fs::remove_all(fs::temp_directory_path() / ("sphereforge_acceptance_" + std::to_string(::getpid())));
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
