#ifndef SPHEREFORGE_REPORT_HPP
#define SPHEREFORGE_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sphereforge/dpw.hpp"
#include "sphereforge/geometry.hpp"
#include "sphereforge/germ.hpp"
#include "sphereforge/singularity.hpp"
#include "sphereforge/versality.hpp"

namespace sphereforge {

using Json = nlohmann::json;

/// Field statistics of one pipeline run; NaN where a statistic is unavailable.
struct FieldStats {
  std::size_t nodes = 0, invalid_nodes = 0, unreachable_nodes = 0;
  std::size_t recomp_flagged = 0, unit_flagged = 0;
  double max_recomposition_error = 0, max_unitarity_error = 0, max_b0_offdiag = 0;
  double harmonicity_residual = kNaN;
  double max_K_deviation = kNaN;
  std::size_t K_nodes = 0;
  double max_H_deviation = kNaN;  // ||H| - 1/2| on the companion
  int companion_delta = 0;
  std::string companion_error;
  bool complete() const { return invalid_nodes == 0 && unreachable_nodes == 0 && recomp_flagged == 0 && unit_flagged == 0; }
};

// Node flags in the sidecar.
enum NodeFlag : int { kInvalid = 1, kRecomp = 2, kUnit = 4, kUnreachable = 8 };

inline std::vector<int> node_flags(const SurfaceFields& s, const PipelineOptions& opt)
{
  std::vector<int> flags(s.grid.size(), 0);
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (!s.valid[k]) {
      flags[k] = kInvalid;
      continue;
    }
    if (s.recomposition_error[k] > opt.tol_recomp) flags[k] |= kRecomp;
    if (s.unitarity_error[k] > opt.tol_unit) flags[k] |= kUnit;
    if (!std::isfinite(s.f[k](0))) flags[k] |= kUnreachable;
  }
  return flags;
}

inline FieldStats field_stats(const SurfaceFields& s, const PipelineOptions& opt)
{
  FieldStats st;
  st.nodes = s.grid.size();
  std::vector<int> flags = node_flags(s, opt);
  for (std::size_t k = 0; k < st.nodes; ++k) {
    if (flags[k] & kInvalid) {
      ++st.invalid_nodes;
      continue;
    }
    if (flags[k] & kUnreachable) ++st.unreachable_nodes;
    if (flags[k] & kRecomp) ++st.recomp_flagged;
    if (flags[k] & kUnit) ++st.unit_flagged;
    st.max_recomposition_error = std::max(st.max_recomposition_error, s.recomposition_error[k]);
    st.max_unitarity_error = std::max(st.max_unitarity_error, s.unitarity_error[k]);
    st.max_b0_offdiag = std::max(st.max_b0_offdiag, s.b0_offdiag[k]);
  }
  st.harmonicity_residual = harmonicity_residual(s.grid, s.N, s.valid);
  std::vector<double> K = gauss_curvature(s);
  double kd = 0;
  for (double v : K)
    if (std::isfinite(v)) {
      kd = std::max(kd, std::abs(v - 1));
      ++st.K_nodes;
    }
  if (st.K_nodes) st.max_K_deviation = kd;
  try {
    CmcCompanion c = cmc_companion(s);
    st.companion_delta = c.delta;
    double hd = 0;
    bool any = false;
    for (double h : c.H)
      if (std::isfinite(h)) {
        hd = std::max(hd, std::abs(std::abs(h) - 0.5));
        any = true;
      }
    if (any) st.max_H_deviation = hd;
  } catch (const CompanionError& e) {
    st.companion_error = e.what();
  }
  return st;
}

inline Json to_json(const FieldStats& s)
{
  return {{"nodes", s.nodes},
          {"invalid_nodes", s.invalid_nodes},
          {"unreachable_nodes", s.unreachable_nodes},
          {"recomposition_flagged", s.recomp_flagged},
          {"unitarity_flagged", s.unit_flagged},
          {"max_recomposition_error", s.max_recomposition_error},
          {"max_unitarity_error", s.max_unitarity_error},
          {"max_b0_offdiag", s.max_b0_offdiag},
          {"harmonicity_residual", s.harmonicity_residual},
          {"max_K_deviation", s.max_K_deviation},
          {"K_nodes", s.K_nodes},
          {"max_H_deviation", s.max_H_deviation},
          {"companion_delta", s.companion_delta},
          {"companion_error", s.companion_error},
          {"complete", s.complete()}};
}

inline Json to_json(const SingularityVerdict& v)
{
  Json j{{"kind", to_string(v.kind)}, {"x", v.x}, {"y", v.y}};
  if (!v.exact.empty()) j["exact"] = v.exact;
  if (!v.numeric.empty()) j["numeric"] = v.numeric;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline Json to_json(const ContourTopology& t)
{
  return {{"components", t.components},
          {"crossings", t.crossings},
          {"boundary_endpoints", t.boundary_endpoints},
          {"endpoint_angles", t.endpoint_angles},
          {"endpoint_component", t.endpoint_component},
          {"closed_small_loops", t.closed_small_loops}};
}

/// Branches of a contour as [x, y] polylines.
inline Json polylines(const Contour& c)
{
  Json out = Json::array();
  for (const auto& br : c.branches) {
    Json line = Json::array();
    for (int v : br) line.push_back({c.vertices[static_cast<std::size_t>(v)].p.x(), c.vertices[static_cast<std::size_t>(v)].p.y()});
    out.push_back(line);
  }
  return out;
}

inline std::map<std::string, int> verdict_counts(const std::vector<SingularityVerdict>& v)
{
  std::map<std::string, int> m;
  for (const auto& e : v)
    if (e.kind != SingularityKind::CuspidalEdge) ++m[to_string(e.kind)];
  return m;
}

inline Json to_json(const WoodVerdict& w)
{
  Json j{{"kind", to_string(w.kind)}, {"witness", w.witness}};
  if (w.kind == WoodKind::MeetingOfFolds) j["fold_count"] = w.fold_count;
  return j;
}

inline Json to_json(const GermClassification& g)
{
  Json j{{"rank_dN0", g.rank0},
         {"wood", to_json(g.wood)},
         {"orbit", g.orbit ? Json(*g.orbit) : Json(nullptr)},
         {"realizable", to_string(g.realizable)},
         {"versal_by_harmonic", to_string(g.versal_by_harmonic)},
         {"certificates", g.certificates}};
  if (g.required_order) j["required_order"] = *g.required_order;
  return j;
}

inline Json to_json(const DistSqVerdict& v)
{
  Json j{{"kind", to_string(v.kind)}, {"certificates", v.certificates}};
  auto opt = [&](const char* key, const std::optional<bool>& b) {
    if (b) j[key] = *b;
  };
  opt("versal", v.versal);
  opt("generic_sections", v.generic_sections);
  opt("morse", v.morse);
  opt("beaks", v.beaks);
  return j;
}

/// Writes the surface as a quad mesh; nodes without a finite f are dropped
/// along with every face touching them.
inline void write_obj(const std::filesystem::path& path, const SurfaceFields& s)
{
  const DomainGrid& g = s.grid;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::vector<long> id(g.size(), 0);
  long next = 1;
  char buf[128];
  out << "# sphereforge surface " << g.nx << "x" << g.ny << "\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec3& f = s.f[k];
    if (!s.valid[k] || !f.allFinite()) continue;
    id[k] = next++;
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", f(0), f(1), f(2));
    out << buf;
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t k = g.index(i, j);
      std::snprintf(buf, sizeof buf, "vt %.9g %.9g\n", g.x(i), g.y(j));
      if (id[k]) out << buf;
    }
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      long a = id[g.index(i, j)], b = id[g.index(i + 1, j)], c = id[g.index(i + 1, j + 1)], d = id[g.index(i, j + 1)];
      if (a && b && c && d) out << "f " << a << "/" << a << " " << b << "/" << b << " " << c << "/" << c << " " << d << "/" << d << "\n";
    }
}

/// Per-node sidecar: N, rho, mu, f and flags, row-major with x fastest.
inline Json sidecar_json(const SurfaceFields& s, const PipelineOptions& opt)
{
  const DomainGrid& g = s.grid;
  Json N = Json::array(), f = Json::array();
  for (std::size_t k = 0; k < g.size(); ++k) {
    N.push_back({s.N[k](0), s.N[k](1), s.N[k](2)});
    f.push_back({s.f[k](0), s.f[k](1), s.f[k](2)});
  }
  return {{"grid", {{"x", {g.x_min, g.x_max}}, {"y", {g.y_min, g.y_max}}, {"nx", g.nx}, {"ny", g.ny}}},
          {"layout", "index = j * nx + i"},
          {"flag_bits", {{"invalid", kInvalid}, {"recomposition", kRecomp}, {"unitarity", kUnit}, {"unreachable", kUnreachable}}},
          {"N", N},
          {"f", f},
          {"rho", s.rho},
          {"mu", s.mu},
          {"recomposition_error", s.recomposition_error},
          {"unitarity_error", s.unitarity_error},
          {"flags", node_flags(s, opt)}};
}

inline void write_json(const std::filesystem::path& path, const Json& j)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_REPORT_HPP
