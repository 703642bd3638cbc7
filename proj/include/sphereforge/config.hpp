#ifndef SPHEREFORGE_CONFIG_HPP
#define SPHEREFORGE_CONFIG_HPP

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sphereforge/dpw.hpp"
#include "sphereforge/germ.hpp"
#include "sphereforge/potential.hpp"
#include "sphereforge/singularity.hpp"
#include "sphereforge/versality.hpp"

namespace sphereforge {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepMode { ShiftB, Perturbation };

struct SweepSpec {
  SweepMode mode = SweepMode::ShiftB;
  std::vector<Rational> values;
  // Expected non-edge verdict multiset per value (empty: no assertion).
  std::vector<std::map<std::string, int>> expect_counts;
  bool expect_morse = false;
};

struct RunConfig {
  std::string name = "run";
  std::optional<CauchyData> cauchy;  // set when the potential came from Cauchy data
  Potential potential;
  Rational perturbation{0};
  DomainGrid grid;
  PipelineOptions pipeline;
  SingularityOptions singularity;
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";
  Json source;  // the parsed document, echoed into reports

  /// Potential actually run: Cauchy b shifted by `shift`, then the perturbation.
  Potential potential_for(const Rational& shift, const Rational& extra_perturbation) const
  {
    Potential p = potential;
    if (shift != 0) {
      if (!cauchy) throw ConfigError("b shift needs a Cauchy-data potential");
      CauchyData cd = *cauchy;
      cd.b = cd.b + RealPoly::constant(shift);
      p = potential_from_cauchy_data(cd, potential.base_point);
    }
    Rational s = perturbation + extra_perturbation;
    if (s != 0) p = add_perturbation(p, s);
    return p;
  }
};

namespace detail {

[[noreturn]] inline void schema(const std::string& what) { throw ConfigError("config: " + what); }

inline const Json& need(const Json& j, const char* key)
{
  if (!j.is_object() || !j.contains(key)) schema(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline Rational json_rational(const Json& j)
{
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number()) return parse_rational(j.dump());
  } catch (const std::invalid_argument& e) {
    schema(e.what());
  }
  schema("expected a number or rational string, got " + j.dump());
}

inline double json_double(const Json& j)
{
  if (j.is_number()) return j.get<double>();
  return to_double(json_rational(j));
}

inline int json_int(const Json& j, const char* what)
{
  if (!j.is_number_integer()) schema(std::string(what) + " must be an integer");
  return j.get<int>();
}

// A complex coefficient is either a real scalar or a pair [re, im].
inline ComplexRational json_complex(const Json& j)
{
  if (j.is_array()) {
    if (j.size() != 2) schema("complex coefficient must be [re, im]");
    return {json_rational(j[0]), json_rational(j[1])};
  }
  return {json_rational(j), Rational(0)};
}

// Polynomials are coefficient lists, constant term first.
inline HoloPoly json_holo(const Json& j)
{
  if (!j.is_array()) schema("polynomial must be a coefficient array");
  std::vector<ComplexRational> c;
  for (const auto& e : j) c.push_back(json_complex(e));
  return HoloPoly(std::move(c));
}

inline RealPoly json_real_poly(const Json& j)
{
  if (!j.is_array()) schema("polynomial must be a coefficient array");
  std::vector<Rational> c;
  for (const auto& e : j) c.push_back(json_rational(e));
  return RealPoly(std::move(c));
}

inline std::vector<int> json_index(const std::string& key, std::size_t n)
{
  std::vector<int> out;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stoi(part));
    } catch (const std::exception&) {
      schema("bad index '" + key + "'");
    }
  }
  if (out.size() != n) schema("index '" + key + "' needs " + std::to_string(n) + " entries");
  for (int v : out)
    if (v < 0) schema("negative index in '" + key + "'");
  return out;
}

inline Potential parse_potential(const Json& j, std::optional<CauchyData>& cauchy, Rational& perturbation)
{
  Potential p;
  if (j.contains("base_point")) p.base_point = json_complex(j["base_point"]);
  if (j.contains("cauchy")) {
    const Json& c = j["cauchy"];
    CauchyData cd{json_real_poly(need(c, "b")), json_real_poly(need(c, "kappa_g"))};
    cauchy = cd;
    p = potential_from_cauchy_data(cd, p.base_point);
  } else if (j.contains("generic")) {
    // {"a": {"n": poly}, "b": {...}, "c": {...}} keyed by grade n.
    const Json& g = j["generic"];
    if (!g.is_object()) schema("'generic' must be an object");
    for (const char* part : {"a", "b", "c"}) {
      if (!g.contains(part)) continue;
      const Json& m = g[part];
      if (!m.is_object()) schema(std::string("generic.") + part + " must map grades to polynomials");
      for (auto it = m.begin(); it != m.end(); ++it) {
        Grade& gr = p.grades[json_index(it.key(), 1)[0]];
        (part[0] == 'a' ? gr.a : part[0] == 'b' ? gr.b : gr.c) = json_holo(*it);
      }
    }
  } else {
    schema("potential needs 'cauchy' or 'generic'");
  }
  if (p.is_zero()) schema("potential is identically zero");
  if (j.contains("perturbation_s")) perturbation = json_rational(j["perturbation_s"]);
  return p;
}

inline DomainGrid parse_grid(const Json& j, const ComplexRational& base)
{
  DomainGrid g;
  if (j.contains("x")) {
    if (!j["x"].is_array() || j["x"].size() != 2) schema("grid.x must be [min, max]");
    g.x_min = json_double(j["x"][0]);
    g.x_max = json_double(j["x"][1]);
  }
  if (j.contains("y")) {
    if (!j["y"].is_array() || j["y"].size() != 2) schema("grid.y must be [min, max]");
    g.y_min = json_double(j["y"][0]);
    g.y_max = json_double(j["y"][1]);
  }
  if (j.contains("nx")) g.nx = json_int(j["nx"], "grid.nx");
  if (j.contains("ny")) g.ny = json_int(j["ny"], "grid.ny");
  g.base_point = base.to_complex();
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    schema(std::string("grid: ") + e.what());
  }
  return g;
}

}  // namespace detail

/// Parses a run document (build or sweep).
inline RunConfig parse_run_config(const Json& j)
{
  using namespace detail;
  if (!j.is_object()) schema("top level must be an object");
  RunConfig c;
  c.source = j;
  if (j.contains("name")) c.name = j["name"].get<std::string>();
  c.potential = parse_potential(need(j, "potential"), c.cauchy, c.perturbation);
  c.grid = parse_grid(j.value("grid", Json::object()), c.potential.base_point);
  if (j.contains("degree")) c.pipeline.degree = json_int(j["degree"], "degree");
  if (c.pipeline.degree < 1) schema("degree must be positive");
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (t.contains("det")) c.pipeline.tol_det = json_double(t["det"]);
    if (t.contains("unit")) c.pipeline.tol_unit = json_double(t["unit"]);
    if (t.contains("recomp")) c.pipeline.tol_recomp = json_double(t["recomp"]);
    if (t.contains("cls")) c.singularity.tol_cls = json_double(t["cls"]);
  }
  if (j.contains("sweep")) {
    const Json& s = j["sweep"];
    SweepSpec sw;
    std::string mode = s.value("mode", "shift_b");
    if (mode == "shift_b") sw.mode = SweepMode::ShiftB;
    else if (mode == "perturbation") sw.mode = SweepMode::Perturbation;
    else schema("sweep.mode must be 'shift_b' or 'perturbation'");
    const Json& v = need(s, "values");
    if (!v.is_array() || v.empty()) schema("sweep.values must be a non-empty array");
    for (const auto& e : v) sw.values.push_back(json_rational(e));
    if (sw.mode == SweepMode::ShiftB && !c.cauchy) schema("shift_b sweeps need a Cauchy-data potential");
    if (s.contains("expect")) {
      const Json& e = s["expect"];
      if (e.contains("verdict_counts")) {
        for (const auto& m : e["verdict_counts"]) {
          std::map<std::string, int> counts;
          for (auto it = m.begin(); it != m.end(); ++it) counts[it.key()] = json_int(*it, "verdict count");
          sw.expect_counts.push_back(counts);
        }
        if (sw.expect_counts.size() != sw.values.size()) schema("verdict_counts needs one entry per sweep value");
      }
      sw.expect_morse = e.value("morse_transition", false);
      if (sw.expect_morse && sw.values.size() != 3) schema("morse_transition expects sweep values {-s, 0, +s}");
    }
    c.sweep = sw;
  }
  if (j.contains("output")) c.output_dir = j["output"].get<std::string>();
  return c;
}

/// {"germ": {"g1": [...], "g2": [...], "k": K}}; coefficients of z^n, constant first.
inline GermPair parse_germ(const Json& j)
{
  using namespace detail;
  const Json& g = need(j, "germ");
  GermPair p;
  p.g1 = json_holo(need(g, "g1"));
  p.g2 = json_holo(need(g, "g2"));
  if (g.contains("k")) p.k = json_int(g["k"], "germ.k");
  if (!p.g1.coeff(0).is_zero() || !p.g2.coeff(0).is_zero()) schema("germ components must vanish at 0");
  return p;
}

enum class VersalityCheck { Classify, A4, Beaks };

struct VersalityJob {
  MongeFamily family;
  VersalityCheck check = VersalityCheck::Classify;
};

/// {"monge": {"a": {"i,j": q}, "beta": {"i,j,k": q}, "r0", "r1", "c0"}, "check": ...}.
inline VersalityJob parse_monge(const Json& j)
{
  using namespace detail;
  const Json& m = need(j, "monge");
  VersalityJob job;
  const Json& a = need(m, "a");
  if (!a.is_object()) schema("monge.a must be an object");
  for (auto it = a.begin(); it != a.end(); ++it) {
    auto ij = json_index(it.key(), 2);
    Rational v = json_rational(*it);
    if (v != 0) job.family.a[{ij[0], ij[1]}] = v;
  }
  if (m.contains("beta")) {
    for (auto it = m["beta"].begin(); it != m["beta"].end(); ++it) {
      auto ijk = json_index(it.key(), 3);
      Rational v = json_rational(*it);
      if (v != 0) job.family.beta[{ijk[0], ijk[1], ijk[2]}] = v;
    }
  }
  if (m.contains("r0")) job.family.r0 = json_rational(m["r0"]);
  if (m.contains("r1")) job.family.r1 = json_rational(m["r1"]);
  if (m.contains("c0")) job.family.c0 = json_rational(m["c0"]);
  std::string check = j.value("check", "classify");
  if (check == "classify") job.check = VersalityCheck::Classify;
  else if (check == "A4") job.check = VersalityCheck::A4;
  else if (check == "beaks") job.check = VersalityCheck::Beaks;
  else schema("check must be 'classify', 'A4' or 'beaks'");
  return job;
}

inline Json load_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_CONFIG_HPP
