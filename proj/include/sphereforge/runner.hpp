#ifndef SPHEREFORGE_RUNNER_HPP
#define SPHEREFORGE_RUNNER_HPP

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphereforge/config.hpp"
#include "sphereforge/report.hpp"

namespace sphereforge {

/// Exact verdicts on y = 0 matched against field events.
struct Agreement {
  bool applicable = false;
  int certified = 0;  // exact non-edge points away from the boundary
  int matched = 0;
  std::vector<std::string> mismatches;
  bool holds() const { return mismatches.empty(); }
};

struct SurfaceRun {
  Rational s{0};
  SurfaceFields fields;
  FieldAnalysis analysis;
  FieldStats stats;
  std::vector<SingularityVerdict> exact;
  Agreement agreement;
  std::map<std::string, int> counts;
};

namespace detail {

// Points within `margin` cells of the rectangle edge are not compared:
// the field classifier needs stencils on both sides.
inline bool interior(const DomainGrid& g, double x, double y, double margin)
{
  return x > g.x_min + margin * g.hx() && x < g.x_max - margin * g.hx() && y > g.y_min + margin * g.hy() &&
         y < g.y_max - margin * g.hy();
}

inline Agreement compare_exact_field(const DomainGrid& g, const std::vector<SingularityVerdict>& exact,
                                     const std::vector<SingularityVerdict>& field)
{
  Agreement a;
  a.applicable = true;
  const double cell = std::hypot(g.hx(), g.hy());
  const double margin = 2;
  auto describe = [](const SingularityVerdict& v) { return std::string(to_string(v.kind)) + " at (" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")"; };
  for (const auto& e : exact) {
    if (e.kind == SingularityKind::CuspidalEdge || !interior(g, e.x, e.y, margin)) continue;
    ++a.certified;
    bool hit = false;
    for (const auto& f : field)
      if (f.kind == e.kind && std::hypot(f.x - e.x, f.y - e.y) <= 2 * cell) hit = true;
    if (hit) ++a.matched;
    else a.mismatches.push_back("exact " + describe(e) + " has no field counterpart");
  }
  for (const auto& f : field) {
    if (!interior(g, f.x, f.y, margin) || std::abs(f.y) > 2 * cell) continue;
    bool hit = false;
    for (const auto& e : exact)
      if (f.kind == e.kind && std::hypot(f.x - e.x, f.y - e.y) <= 2 * cell) hit = true;
    if (!hit) a.mismatches.push_back("field " + describe(f) + " is not certified");
  }
  return a;
}

inline Json to_json(const Agreement& a)
{
  return {{"applicable", a.applicable}, {"certified", a.certified}, {"matched", a.matched}, {"mismatches", a.mismatches}, {"holds", a.holds()}};
}

}  // namespace detail

/// Pipeline, field statistics and both classifiers for one potential. Exact
/// verdicts are produced when `exact_data` is given and the base point is real.
inline SurfaceRun run_surface(const Potential& p, const DomainGrid& grid, const PipelineOptions& po, const SingularityOptions& so,
                              const std::optional<CauchyData>& exact_data)
{
  SurfaceRun r;
  r.fields = run_pipeline(p, grid, po);
  r.stats = field_stats(r.fields, po);
  r.analysis = analyze_fields(r.fields, so);
  r.counts = verdict_counts(r.analysis.events);
  if (exact_data && p.base_point.im == 0) {
    r.exact = enumerate_cauchy_verdicts(*exact_data, Rational(grid.x_min), Rational(grid.x_max));
    r.agreement = detail::compare_exact_field(grid, r.exact, r.analysis.events);
  }
  return r;
}

inline Json surface_report(const SurfaceRun& r, const RunConfig& cfg)
{
  const FieldAnalysis& fa = r.analysis;
  Json verdicts = Json::array(), exact = Json::array();
  for (const auto& v : fa.events) verdicts.push_back(to_json(v));
  for (const auto& v : r.exact) exact.push_back(to_json(v));
  Json j;
  j["name"] = cfg.name;
  j["config"] = cfg.source;
  j["degree"] = cfg.pipeline.degree;
  j["tolerances"] = {{"det", cfg.pipeline.tol_det},
                     {"unit", cfg.pipeline.tol_unit},
                     {"recomp", cfg.pipeline.tol_recomp},
                     {"cls", cfg.singularity.tol_cls}};
  j["grid"] = {{"x", {cfg.grid.x_min, cfg.grid.x_max}}, {"y", {cfg.grid.y_min, cfg.grid.y_max}}, {"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}};
  j["rank_at_basepoint"] = to_string(rank_at_basepoint(cfg.potential));
  j["stats"] = to_json(r.stats);
  j["singular_set"] = {{"topology", to_json(fa.curve.mu_contour.topology)},
                       {"rho_curve_topology", to_json(fa.curve.topology)},
                       {"cross_validation_cells", fa.curve.cross_validation},
                       {"rank0_present", fa.curve.rank0_present},
                       {"edge_vertices", fa.edge_vertices},
                       {"unclassified_vertices", fa.unclassified_vertices},
                       {"lips_signatures", fa.lips_signatures},
                       {"d4_signatures", fa.d4_signatures},
                       {"polylines", polylines(fa.curve.mu_contour)}};
  j["verdicts"] = verdicts;
  j["verdict_counts"] = r.counts;
  j["exact_verdicts"] = exact;
  j["agreement"] = r.agreement.applicable ? detail::to_json(r.agreement) : Json(nullptr);
  return j;
}

inline void write_surface_artifacts(const SurfaceRun& r, const RunConfig& cfg, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  write_obj(dir / "surface.obj", r.fields);
  write_json(dir / "fields.json", sidecar_json(r.fields, cfg.pipeline));
  write_json(dir / "report.json", surface_report(r, cfg));
}

/// Single surface. Returns 0 on success, 2 when the pipeline left flagged nodes
/// (artifacts are still written and marked incomplete).
inline int run_build(const RunConfig& cfg, std::ostream& log = std::cerr)
{
  std::optional<CauchyData> exact;
  if (cfg.perturbation == 0) exact = cfg.cauchy;
  SurfaceRun r = run_surface(cfg.potential_for(0, 0), cfg.grid, cfg.pipeline, cfg.singularity, exact);
  write_surface_artifacts(r, cfg, cfg.output_dir);
  log << cfg.name << ": " << r.analysis.events.size() << " non-edge verdicts, max recomposition error "
      << r.stats.max_recomposition_error << "\n";
  if (!r.stats.complete()) {
    log << cfg.name << ": pipeline left flagged nodes, artifacts marked incomplete\n";
    return 2;
  }
  return 0;
}

struct SweepEntry {
  Rational s;
  ContourTopology topology;
  std::map<std::string, int> counts;
  FieldStats stats;
  Agreement agreement;
  int lips = 0, d4 = 0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::optional<bool> counts_ok;
  std::optional<MorseTransition> morse;
  bool agreement_ok = true;
  bool complete = true;
  bool passed() const { return complete && agreement_ok && counts_ok.value_or(true) && (!morse || morse->holds()); }
};

inline Json to_json(const SweepReport& r, const RunConfig& cfg)
{
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"s", to_string(e.s)},
                       {"topology", to_json(e.topology)},
                       {"verdict_counts", e.counts},
                       {"lips_signatures", e.lips},
                       {"d4_signatures", e.d4},
                       {"stats",
                        {{"harmonicity_residual", e.stats.harmonicity_residual},
                         {"max_K_deviation", e.stats.max_K_deviation},
                         {"max_unitarity_error", e.stats.max_unitarity_error},
                         {"max_recomposition_error", e.stats.max_recomposition_error},
                         {"complete", e.stats.complete()}}},
                       {"agreement", e.agreement.applicable ? detail::to_json(e.agreement) : Json(nullptr)}});
  }
  Json j{{"name", cfg.name}, {"mode", cfg.sweep->mode == SweepMode::ShiftB ? "shift_b" : "perturbation"}, {"entries", entries}};
  Json a = Json::object();
  if (r.counts_ok) a["verdict_counts"] = *r.counts_ok;
  if (r.morse)
    a["morse_transition"] = {{"endpoints_matched", r.morse->endpoints_matched},
                             {"pairing_changed", r.morse->pairing_changed},
                             {"crossing_at_zero", r.morse->crossing_at_zero},
                             {"holds", r.morse->holds()}};
  a["exact_field_agreement"] = r.agreement_ok;
  a["complete"] = r.complete;
  j["assertions"] = a;
  j["passed"] = r.passed();
  return j;
}

/// Runs every sweep value, writes per-value artifacts under out/s<k>/ and the
/// comparative sweep_report.json, and checks the configured expectations.
inline SweepReport run_sweep(const RunConfig& cfg, std::ostream& log = std::cerr)
{
  if (!cfg.sweep || cfg.sweep->values.empty()) throw ConfigError("config has no sweep values");
  const SweepSpec& sw = *cfg.sweep;
  SweepReport rep;
  std::vector<ContourTopology> topo;
  const std::filesystem::path out(cfg.output_dir);
  for (std::size_t k = 0; k < sw.values.size(); ++k) {
    const Rational& s = sw.values[k];
    Potential p = sw.mode == SweepMode::ShiftB ? cfg.potential_for(s, 0) : cfg.potential_for(0, s);
    std::optional<CauchyData> exact;
    if (cfg.cauchy && cfg.perturbation + (sw.mode == SweepMode::Perturbation ? s : Rational(0)) == 0) {
      exact = cfg.cauchy;
      if (sw.mode == SweepMode::ShiftB) exact->b = exact->b + RealPoly::constant(s);
    }
    SurfaceRun r = run_surface(p, cfg.grid, cfg.pipeline, cfg.singularity, exact);
    r.s = s;
    write_surface_artifacts(r, cfg, out / ("s" + std::to_string(k)));
    SweepEntry e{s, r.analysis.curve.mu_contour.topology, r.counts, r.stats, r.agreement, r.analysis.lips_signatures, r.analysis.d4_signatures};
    rep.complete = rep.complete && r.stats.complete();
    rep.agreement_ok = rep.agreement_ok && r.agreement.holds();
    topo.push_back(e.topology);
    log << cfg.name << " s=" << to_string(s) << ": components " << e.topology.components << ", crossings " << e.topology.crossings;
    for (auto& [kind, n] : e.counts) log << ", " << kind << " x" << n;
    log << "\n";
    rep.entries.push_back(std::move(e));
  }
  if (!sw.expect_counts.empty()) {
    bool ok = true;
    for (std::size_t k = 0; k < rep.entries.size(); ++k) ok = ok && rep.entries[k].counts == sw.expect_counts[k];
    rep.counts_ok = ok;
  }
  if (sw.expect_morse) rep.morse = morse_transition(topo[0], topo[1], topo[2]);
  std::filesystem::create_directories(out);
  write_json(out / "sweep_report.json", to_json(rep, cfg));
  return rep;
}

inline Json run_classify_germ(const GermPair& g)
{
  Json j{{"jet_order", g.jet_order()}, {"jacobian", to_string(jacobian_germ(g))}};
  j["wood"] = to_json(wood_classify_germ(g));
  if (rank_at_zero(real_germ(g)) == 2)
    j["orbit"] = {{"rank_dN0", 2}, {"note", "local diffeomorphism"}};
  else
    j["orbit"] = to_json(recognize_orbit(g));
  return j;
}

inline Json run_versality(const VersalityJob& job)
{
  RotatedMonge m = normalize_rotation(job.family);
  Json j;
  j["rotated_quadratic"] = {{"a20", to_string(m.A(2, 0))}, {"a02", to_string(m.A(0, 2))}};
  DistSqVerdict v;
  switch (job.check) {
    case VersalityCheck::Classify: v = classify_distance_singularity(m); break;
    case VersalityCheck::A4: v = check_versal_A4(m); break;
    case VersalityCheck::Beaks: v = check_versal_beaks(m); break;
  }
  j["verdict"] = to_json(v);
  if (v.kind == DistSqKind::A4 || v.kind == DistSqKind::A3nonTransMinus || v.kind == DistSqKind::A3nonTransPlus ||
      v.kind == DistSqKind::A3transverse) {
    Sa3Jet<Algebraic> sj = sa3_jet(m);
    j["sa3_jet"] = {{"determinant", to_string(sj.determinant())}, {"regular", sj.regular()}};
  }
  return j;
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_RUNNER_HPP
