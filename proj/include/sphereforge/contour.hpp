#ifndef SPHEREFORGE_CONTOUR_HPP
#define SPHEREFORGE_CONTOUR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphereforge/fields.hpp"

namespace sphereforge {

using Vec2 = Eigen::Vector2d;

/// A contour vertex sits on a grid edge (a, b) at parameter t from a; vertices
/// landing exactly on a node are keyed by the node alone so that neighbouring
/// cells share them.
struct ContourVertex {
  std::size_t a = 0, b = 0;
  double t = 0;
  Vec2 p = Vec2::Zero();
};

struct Crossing {
  Vec2 p = Vec2::Zero();
  std::size_t node = 0;  // nearest grid node
};

struct ContourTopology {
  int components = 0;
  int crossings = 0;
  int boundary_endpoints = 0;
  // Endpoints sorted by angle about the rectangle centre; pairing[k] = component id.
  std::vector<double> endpoint_angles;
  std::vector<int> endpoint_component;
  int closed_small_loops = 0;
};

struct Contour {
  std::vector<ContourVertex> vertices;
  std::vector<std::pair<int, int>> segments;
  std::vector<Crossing> crossings;
  std::vector<int> component;  // per vertex, after merging through crossings
  // Maximal vertex paths between vertices of degree != 2 (or closed loops).
  std::vector<std::vector<int>> branches;
  std::vector<Vec2> boundary_endpoints;
  ContourTopology topology;
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x)
  {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  }
  void unite(int a, int b)
  {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

inline int snapped_sign(double v, double eps) { return v < -eps ? -1 : 1; }

}  // namespace detail

/// Zero contour of v by marching squares. Values with |v| <= eps are snapped to 0
/// and treated as positive. Cells touching a node with ok == 0 are skipped.
inline Contour marching_squares(const DomainGrid& g, const std::vector<double>& v, const std::vector<char>& ok, double eps)
{
  Contour c;
  std::map<std::pair<std::size_t, std::size_t>, int> key_to_vertex;  // node keys use (n, n)
  auto value = [&](std::size_t k) { return std::abs(v[k]) <= eps ? 0.0 : v[k]; };
  auto pos = [&](std::size_t k) {
    return Vec2(g.x(static_cast<int>(k % static_cast<std::size_t>(g.nx))), g.y(static_cast<int>(k / static_cast<std::size_t>(g.nx))));
  };
  auto vertex_on = [&](std::size_t a, std::size_t b) -> int {
    double va = value(a), vb = value(b);
    double t = va / (va - vb);
    std::pair<std::size_t, std::size_t> key;
    if (va == 0) {
      key = {a, a};
      t = 0;
    } else if (vb == 0) {
      key = {b, b};
      t = 0;
      a = b;
    } else {
      key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    }
    auto it = key_to_vertex.find(key);
    if (it != key_to_vertex.end()) return it->second;
    ContourVertex cv;
    cv.a = a;
    cv.b = (key.first == key.second) ? a : b;
    cv.t = t;
    cv.p = (1 - t) * pos(a) + t * pos(cv.b);
    c.vertices.push_back(cv);
    int id = static_cast<int>(c.vertices.size()) - 1;
    key_to_vertex[key] = id;
    return id;
  };

  std::set<std::pair<int, int>> seen;
  auto add_segment = [&](int p, int q) {
    if (p == q) return;
    auto key = std::minmax(p, q);
    if (seen.insert(key).second) c.segments.emplace_back(key.first, key.second);
  };

  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      // Corners counter-clockwise from bottom-left.
      std::size_t n[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
      if (!ok[n[0]] || !ok[n[1]] || !ok[n[2]] || !ok[n[3]]) continue;
      int s[4];
      for (int k = 0; k < 4; ++k) s[k] = detail::snapped_sign(v[n[k]], eps);
      std::vector<int> hits;
      for (int e = 0; e < 4; ++e) {
        std::size_t a = n[e], b = n[(e + 1) % 4];
        if (s[e] != s[(e + 1) % 4]) hits.push_back(vertex_on(a, b));
      }
      if (hits.size() == 2) {
        add_segment(hits[0], hits[1]);
      } else if (hits.size() == 4) {
        double center = 0.25 * (value(n[0]) + value(n[1]) + value(n[2]) + value(n[3]));
        // Edges are ordered bottom, right, top, left; the centre sign decides which
        // corners are joined.
        bool join_positive_diagonal = (detail::snapped_sign(center, eps) == s[0]);
        if (join_positive_diagonal) {
          add_segment(hits[0], hits[1]);
          add_segment(hits[2], hits[3]);
        } else {
          add_segment(hits[3], hits[0]);
          add_segment(hits[1], hits[2]);
        }
      }
    }
  return c;
}

/// Zero-level saddles: near-zero nodes whose 8-neighbour ring changes sign at
/// least four times, plus cells of alternating sign whose bilinear saddle value
/// is small. Hits within `cluster_radius` are merged.
inline std::vector<Crossing> find_crossings(const DomainGrid& g, const std::vector<double>& v, const std::vector<char>& ok,
                                            double eps, double near_zero, double cluster_radius)
{
  std::vector<Vec2> hits;
  std::vector<std::size_t> hit_nodes;
  static constexpr int ring[8][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i) {
      std::size_t k = g.index(i, j);
      if (!ok[k] || std::abs(v[k]) > near_zero) continue;
      bool full = true;
      int signs[8];
      for (int r = 0; r < 8; ++r) {
        std::size_t q = g.index(i + ring[r][0], j + ring[r][1]);
        if (!ok[q]) full = false;
        signs[r] = detail::snapped_sign(v[q], eps);
      }
      if (!full) continue;
      int changes = 0;
      for (int r = 0; r < 8; ++r) changes += signs[r] != signs[(r + 1) % 8];
      if (changes >= 4) {
        hits.emplace_back(g.x(i), g.y(j));
        hit_nodes.push_back(k);
      }
    }
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      std::size_t n00 = g.index(i, j), n10 = g.index(i + 1, j), n11 = g.index(i + 1, j + 1), n01 = g.index(i, j + 1);
      if (!ok[n00] || !ok[n10] || !ok[n11] || !ok[n01]) continue;
      int s00 = detail::snapped_sign(v[n00], eps), s10 = detail::snapped_sign(v[n10], eps);
      int s11 = detail::snapped_sign(v[n11], eps), s01 = detail::snapped_sign(v[n01], eps);
      if (!(s00 == s11 && s10 == s01 && s00 != s10)) continue;
      double a = v[n00], b = v[n10], c = v[n11], d = v[n01];
      double den = a + c - b - d;
      if (den == 0) continue;
      double saddle = (a * c - b * d) / den;
      if (std::abs(saddle) > near_zero) continue;
      double u = (a - d) / den, w = (a - b) / den;  // saddle location in cell coordinates
      u = std::clamp(u, 0.0, 1.0);
      w = std::clamp(w, 0.0, 1.0);
      hits.emplace_back(g.x(i) + u * g.hx(), g.y(j) + w * g.hy());
      hit_nodes.push_back(u < 0.5 ? (w < 0.5 ? n00 : n01) : (w < 0.5 ? n10 : n11));
    }
  std::vector<Crossing> out;
  for (std::size_t h = 0; h < hits.size(); ++h) {
    bool merged = false;
    for (std::size_t c = 0; c < out.size(); ++c)
      if ((out[c].p - hits[h]).norm() <= cluster_radius) {
        merged = true;
        break;
      }
    if (!merged) out.push_back({hits[h], hit_nodes[h]});
  }
  return out;
}

/// Components (merged through crossings), branches, boundary endpoints.
inline void analyze_topology(const DomainGrid& g, const std::vector<char>& ok, Contour& c, double cluster_radius)
{
  const std::size_t nv = c.vertices.size();
  detail::UnionFind uf(nv);
  std::vector<std::vector<int>> adj(nv);
  for (auto [p, q] : c.segments) {
    uf.unite(p, q);
    adj[static_cast<std::size_t>(p)].push_back(q);
    adj[static_cast<std::size_t>(q)].push_back(p);
  }
  for (const Crossing& x : c.crossings) {
    int first = -1;
    for (std::size_t k = 0; k < nv; ++k)
      if ((c.vertices[k].p - x.p).norm() <= cluster_radius) {
        if (first < 0)
          first = static_cast<int>(k);
        else
          uf.unite(first, static_cast<int>(k));
      }
  }
  std::map<int, int> relabel;
  c.component.assign(nv, -1);
  for (std::size_t k = 0; k < nv; ++k) {
    if (adj[k].empty()) continue;
    int r = uf.find(static_cast<int>(k));
    auto it = relabel.emplace(r, static_cast<int>(relabel.size())).first;
    c.component[k] = it->second;
  }
  c.topology.components = static_cast<int>(relabel.size());
  c.topology.crossings = static_cast<int>(c.crossings.size());

  // Branches: walk from every vertex of degree != 2, then pick up closed loops.
  std::set<std::pair<int, int>> used;
  auto walk = [&](int start, int next) {
    std::vector<int> path{start};
    int prev = start, cur = next;
    used.insert(std::minmax(prev, cur));
    while (true) {
      path.push_back(cur);
      if (adj[static_cast<std::size_t>(cur)].size() != 2 || cur == start) break;
      int nxt = adj[static_cast<std::size_t>(cur)][0] == prev ? adj[static_cast<std::size_t>(cur)][1] : adj[static_cast<std::size_t>(cur)][0];
      if (used.count(std::minmax(cur, nxt))) break;
      used.insert(std::minmax(cur, nxt));
      prev = cur;
      cur = nxt;
    }
    return path;
  };
  for (std::size_t k = 0; k < nv; ++k) {
    if (adj[k].empty() || adj[k].size() == 2) continue;
    for (int nb : adj[k])
      if (!used.count(std::minmax(static_cast<int>(k), nb))) c.branches.push_back(walk(static_cast<int>(k), nb));
  }
  for (std::size_t k = 0; k < nv; ++k)
    for (int nb : adj[k])
      if (!used.count(std::minmax(static_cast<int>(k), nb))) c.branches.push_back(walk(static_cast<int>(k), nb));

  // Boundary endpoints: degree-1 vertices on the rectangle edge or next to masked nodes.
  const double tol = 1e-9 * std::max(g.x_max - g.x_min, g.y_max - g.y_min);
  auto on_boundary = [&](const Vec2& p) {
    return std::abs(p.x() - g.x_min) <= tol || std::abs(p.x() - g.x_max) <= tol || std::abs(p.y() - g.y_min) <= tol ||
           std::abs(p.y() - g.y_max) <= tol;
  };
  auto near_mask = [&](const ContourVertex& v) {
    for (std::size_t n : {v.a, v.b}) {
      int i = static_cast<int>(n % static_cast<std::size_t>(g.nx)), j = static_cast<int>(n / static_cast<std::size_t>(g.nx));
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
          int ii = i + a, jj = j + b;
          if (ii >= 0 && jj >= 0 && ii < g.nx && jj < g.ny && !ok[g.index(ii, jj)]) return true;
        }
    }
    return false;
  };
  const Vec2 centre(0.5 * (g.x_min + g.x_max), 0.5 * (g.y_min + g.y_max));
  std::vector<std::pair<double, int>> ends;
  for (std::size_t k = 0; k < nv; ++k) {
    if (adj[k].size() != 1) continue;
    if (!on_boundary(c.vertices[k].p) && !near_mask(c.vertices[k])) continue;
    c.boundary_endpoints.push_back(c.vertices[k].p);
    Vec2 d = c.vertices[k].p - centre;
    ends.emplace_back(std::atan2(d.y(), d.x()), c.component[k]);
  }
  std::sort(ends.begin(), ends.end());
  c.topology.boundary_endpoints = static_cast<int>(ends.size());
  for (auto [a, comp] : ends) {
    c.topology.endpoint_angles.push_back(a);
    c.topology.endpoint_component.push_back(comp);
  }

  // Closed components spanning at most three cells: isolated-point candidates.
  std::map<int, std::pair<Vec2, Vec2>> box;
  std::map<int, bool> has_end;
  for (std::size_t k = 0; k < nv; ++k) {
    int comp = c.component[k];
    if (comp < 0) continue;
    auto it = box.find(comp);
    if (it == box.end())
      box[comp] = {c.vertices[k].p, c.vertices[k].p};
    else {
      it->second.first = it->second.first.cwiseMin(c.vertices[k].p);
      it->second.second = it->second.second.cwiseMax(c.vertices[k].p);
    }
    if (adj[k].size() == 1) has_end[comp] = true;
  }
  for (auto& [comp, b] : box) {
    Vec2 ext = b.second - b.first;
    if (!has_end[comp] && ext.x() <= 3 * g.hx() && ext.y() <= 3 * g.hy()) ++c.topology.closed_small_loops;
  }
}

/// Pairing of boundary endpoints as a canonical partition of endpoint indices.
inline std::vector<std::vector<int>> endpoint_pairing(const ContourTopology& t)
{
  std::map<int, std::vector<int>> groups;
  for (std::size_t k = 0; k < t.endpoint_component.size(); ++k) groups[t.endpoint_component[k]].push_back(static_cast<int>(k));
  std::vector<std::vector<int>> out;
  for (auto& [c, v] : groups) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

/// Distance from p to the polyline set of a contour.
inline double distance_to_contour(const Contour& c, const Vec2& p)
{
  double best = std::numeric_limits<double>::infinity();
  for (auto [a, b] : c.segments) {
    Vec2 u = c.vertices[static_cast<std::size_t>(a)].p, w = c.vertices[static_cast<std::size_t>(b)].p;
    Vec2 d = w - u;
    double t = d.squaredNorm() > 0 ? std::clamp((p - u).dot(d) / d.squaredNorm(), 0.0, 1.0) : 0.0;
    best = std::min(best, (u + t * d - p).norm());
  }
  for (const auto& v : c.vertices) best = std::min(best, (v.p - p).norm());
  return best;
}

}  // namespace sphereforge

#endif  // SPHEREFORGE_CONTOUR_HPP
