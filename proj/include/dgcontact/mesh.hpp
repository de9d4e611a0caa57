#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dgcontact/errors.hpp"
#include "dgcontact/geometry.hpp"

namespace dgc {

enum class BoundaryTag { G1, G2 };

/// Edge classes: E_h^i (interior), E_h^1 (Gamma_1 boundary), E_h^2 (Gamma_2
/// boundary). E_h^0 = interior + Gamma_1.
enum class EdgeClass { Interior, Gamma1, Gamma2 };

struct Triangle {
  std::array<int, 3> v;  // vertex ids, CCW
  double area = 0.0;
  double diameter = 0.0;  // h_K = longest side
  int parent = -1;        // triangle id in the parent mesh (id itself if unrefined)
  int level = 0;
};

/// A facet of the triangulation: the finest subdivision of element
/// interfaces. A side of a coarse triangle carrying a hanging node is
/// represented by its two halves, each an interior facet whose `coarse_tri`
/// is the unrefined neighbor.
struct Edge {
  int a = -1, b = -1;   // vertex ids, a < b
  int tri_plus = -1;    // smaller incident triangle id ("+" side)
  int tri_minus = -1;   // other triangle, -1 on the boundary
  int coarse_tri = -1;  // triangle for which this facet is half of a full side
  Vec2 normal;          // unit normal, outward from tri_plus
  double length = 0.0;  // h_e
  EdgeClass cls = EdgeClass::Interior;
};

namespace detail {

inline std::uint64_t bits_of(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return u;
}

struct PointKey {
  std::uint64_t x, y;
  bool operator==(const PointKey& o) const { return x == o.x && y == o.y; }
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const {
    std::uint64_t h = k.x * 0x9e3779b97f4a7c15ull ^ (k.y + 0x7f4a7c15u);
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

inline std::pair<int, int> sorted_pair(int a, int b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace detail

class Mesh {
 public:
  using TagMap = std::map<std::pair<int, int>, BoundaryTag>;

  /// Builds a mesh from raw geometry. Boundary tags are keyed by sorted
  /// vertex pairs of the boundary sides. Throws ValidationError when an
  /// invariant fails (orientation, untagged boundary, angle bound, empty
  /// Gamma_1).
  static Mesh build(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                    TagMap boundary_tags, double min_angle_deg = 20.0) {
    Mesh m;
    m.min_angle_deg_ = min_angle_deg;
    m.vertices_ = std::move(vertices);
    m.boundary_tags_ = std::move(boundary_tags);
    m.triangles_.reserve(triangles.size());
    for (std::size_t t = 0; t < triangles.size(); ++t) {
      m.triangles_.push_back(make_triangle(m.vertices_, triangles[t], static_cast<int>(t)));
      m.triangles_.back().parent = static_cast<int>(t);
    }
    m.connect();
    m.validate();
    return m;
  }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::set<int>& hanging_nodes() const { return hanging_nodes_; }
  const TagMap& boundary_tags() const { return boundary_tags_; }
  double min_angle_threshold() const { return min_angle_deg_; }

  int n_triangles() const { return static_cast<int>(triangles_.size()); }
  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<int>& interior_edges() const { return interior_edges_; }
  const std::vector<int>& gamma1_edges() const { return gamma1_edges_; }
  const std::vector<int>& gamma2_edges() const { return gamma2_edges_; }
  /// Position of a Gamma_2 edge within gamma2_edges().
  int gamma2_position(int e) const {
    if (edges_[e].cls != EdgeClass::Gamma2) throw ValidationError("edge is not on Gamma_2");
    return gamma2_pos_[e];
  }
  /// E(K): facets on the boundary of triangle t.
  const std::vector<int>& edges_of(int t) const { return edges_of_tri_[t]; }

  Point edge_point(int e, double s) const {
    const Edge& ed = edges_[e];
    return vertices_[ed.a] + s * (vertices_[ed.b] - vertices_[ed.a]);
  }

  Point centroid(int t) const {
    const auto& v = triangles_[t].v;
    return (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]]) / 3.0;
  }

  /// Barycentric coordinates of x with respect to triangle t.
  std::array<double, 3> barycentric(int t, const Point& x) const {
    const auto& v = triangles_[t].v;
    const Point &p0 = vertices_[v[0]], &p1 = vertices_[v[1]], &p2 = vertices_[v[2]];
    double a2 = signed_area2(p0, p1, p2);
    double l0 = signed_area2(x, p1, p2) / a2;
    double l1 = signed_area2(p0, x, p2) / a2;
    return {l0, l1, 1.0 - l0 - l1};
  }

  /// Constant gradients of the three P1 nodal basis functions on triangle t.
  std::array<Vec2, 3> basis_gradients(int t) const {
    const auto& v = triangles_[t].v;
    const Point &p0 = vertices_[v[0]], &p1 = vertices_[v[1]], &p2 = vertices_[v[2]];
    double a2 = signed_area2(p0, p1, p2);
    return {Vec2{p1.y - p2.y, p2.x - p1.x} / a2, Vec2{p2.y - p0.y, p0.x - p2.x} / a2,
            Vec2{p0.y - p1.y, p1.x - p0.x} / a2};
  }

  double total_area() const {
    double s = 0.0;
    for (const auto& t : triangles_) s += t.area;
    return s;
  }

  double min_angle_deg() const {
    double mn = 180.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) mn = std::min(mn, triangle_min_angle(t));
    return mn;
  }

  /// Red-refines the marked triangles (plus closure needed to keep every
  /// full side at most once-split) and returns the new mesh. Child triangles
  /// record their parent id in this mesh.
  Mesh refine(const std::set<int>& marked) const {
    for (int t : marked)
      if (t < 0 || t >= n_triangles()) throw ValidationError("refine: triangle id out of range");

    // Closure: a triangle whose side is already a half of a coarser
    // neighbor's side drags that neighbor along.
    std::set<int> work = marked;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int t : std::vector<int>(work.begin(), work.end())) {
        for (int e : edges_of_tri_[t]) {
          int c = edges_[e].coarse_tri;
          if (c >= 0 && c != t && work.insert(c).second) changed = true;
        }
      }
    }

    std::vector<Point> verts = vertices_;
    std::unordered_map<detail::PointKey, int, detail::PointKeyHash> pos_index;
    for (std::size_t i = 0; i < verts.size(); ++i)
      pos_index[{detail::bits_of(verts[i].x), detail::bits_of(verts[i].y)}] = static_cast<int>(i);

    auto mid_vertex = [&](int a, int b) {
      Point m = midpoint(verts[a], verts[b]);
      detail::PointKey key{detail::bits_of(m.x), detail::bits_of(m.y)};
      auto it = pos_index.find(key);
      if (it != pos_index.end()) return it->second;
      verts.push_back(m);
      int id = static_cast<int>(verts.size()) - 1;
      pos_index[key] = id;
      return id;
    };

    std::vector<std::array<int, 3>> tris;
    std::vector<int> parents, levels;
    for (int t = 0; t < n_triangles(); ++t) {
      const auto& v = triangles_[t].v;
      if (!work.count(t)) {
        tris.push_back(v);
        parents.push_back(t);
        levels.push_back(triangles_[t].level);
        continue;
      }
      int m01 = mid_vertex(v[0], v[1]);
      int m12 = mid_vertex(v[1], v[2]);
      int m20 = mid_vertex(v[2], v[0]);
      for (auto child : {std::array{v[0], m01, m20}, std::array{m01, v[1], m12},
                         std::array{m20, m12, v[2]}, std::array{m01, m12, m20}}) {
        tris.push_back(child);
        parents.push_back(t);
        levels.push_back(triangles_[t].level + 1);
      }
    }

    // Propagate boundary tags: a tagged side of a refined triangle splits
    // into two halves with the same tag.
    TagMap tags;
    for (const auto& [side, tag] : boundary_tags_) {
      auto [a, b] = side;
      Point m = midpoint(vertices_[a], vertices_[b]);
      auto it = pos_index.find({detail::bits_of(m.x), detail::bits_of(m.y)});
      bool split = false;
      if (it != pos_index.end()) {
        // The midpoint vertex exists; split iff the incident triangle was refined.
        int e = find_edge(a, b);
        if (e >= 0 && work.count(edges_[e].tri_plus)) split = true;
      }
      if (split) {
        tags[detail::sorted_pair(a, it->second)] = tag;
        tags[detail::sorted_pair(it->second, b)] = tag;
      } else {
        tags[side] = tag;
      }
    }

    Mesh fine;
    fine.min_angle_deg_ = min_angle_deg_;
    fine.vertices_ = std::move(verts);
    fine.boundary_tags_ = std::move(tags);
    fine.triangles_.reserve(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
      Triangle tri = make_triangle(fine.vertices_, tris[t], static_cast<int>(t));
      tri.parent = parents[t];
      tri.level = levels[t];
      fine.triangles_.push_back(tri);
    }
    fine.connect();
    fine.validate();
    return fine;
  }

  Mesh uniform_refine() const {
    std::set<int> all;
    for (int t = 0; t < n_triangles(); ++t) all.insert(t);
    return refine(all);
  }

  /// omega_K: all triangles whose closure touches the closure of K.
  std::vector<int> patch_of_triangle(int t) const {
    std::set<int> out;
    for (int n : node_set_[t]) out.insert(node_to_tris_[n].begin(), node_to_tris_[n].end());
    return {out.begin(), out.end()};
  }

  /// omega_e: incident triangles of edge e (two interior, one boundary).
  std::vector<int> patch_of_edge(int e) const {
    const Edge& ed = edges_[e];
    if (ed.tri_minus < 0) return {ed.tri_plus};
    return {ed.tri_plus, ed.tri_minus};
  }

  /// omega_nu: triangles having node nu as a vertex.
  const std::vector<int>& patch_of_node(int nu) const { return node_patches_[nu]; }

  /// Nodes on Gamma_1 (endpoints of Gamma_1 facets).
  const std::set<int>& gamma1_nodes() const { return gamma1_nodes_; }

  bool is_one_irregular() const {
    // Each split side contributes exactly two half-facets sharing one
    // hanging vertex that is not a vertex of the coarse triangle.
    std::map<std::pair<int, int>, int> halves_per_side;
    for (const auto& e : edges_) {
      if (e.coarse_tri < 0) continue;
      const auto& cv = triangles_[e.coarse_tri].v;
      auto is_corner = [&](int n) { return n == cv[0] || n == cv[1] || n == cv[2]; };
      int hang = is_corner(e.a) ? e.b : e.a;
      if (is_corner(hang) || !hanging_nodes_.count(hang)) return false;
      halves_per_side[{e.coarse_tri, hang}] += 1;
    }
    for (const auto& [side, count] : halves_per_side)
      if (count != 2) return false;
    return true;
  }

 private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  TagMap boundary_tags_;
  std::set<int> hanging_nodes_;
  std::vector<int> interior_edges_, gamma1_edges_, gamma2_edges_;
  std::vector<int> gamma2_pos_;
  std::vector<std::vector<int>> edges_of_tri_;
  std::map<std::pair<int, int>, int> edge_index_;
  std::vector<std::vector<int>> node_set_;  // per triangle: endpoints of its facets
  std::vector<std::vector<int>> node_to_tris_;  // inverse of node_set_
  std::vector<std::vector<int>> node_patches_;
  std::set<int> gamma1_nodes_;
  double min_angle_deg_ = 20.0;

  static Triangle make_triangle(const std::vector<Point>& verts, const std::array<int, 3>& v,
                                int id) {
    for (int j = 0; j < 3; ++j)
      if (v[j] < 0 || v[j] >= static_cast<int>(verts.size()))
        throw ValidationError("triangle " + std::to_string(id) + ": vertex index out of range");
    double a2 = signed_area2(verts[v[0]], verts[v[1]], verts[v[2]]);
    if (a2 <= 0.0)
      throw ValidationError("triangle " + std::to_string(id) +
                            ": inverted or degenerate (non-CCW orientation)");
    Triangle t;
    t.v = v;
    t.area = 0.5 * a2;
    t.diameter = std::max({norm(verts[v[1]] - verts[v[0]]), norm(verts[v[2]] - verts[v[1]]),
                           norm(verts[v[0]] - verts[v[2]])});
    return t;
  }

  int find_edge(int a, int b) const {
    auto it = edge_index_.find(detail::sorted_pair(a, b));
    return it == edge_index_.end() ? -1 : it->second;
  }

  double triangle_min_angle(std::size_t t) const {
    const auto& v = triangles_[t].v;
    double mn = 180.0;
    for (int j = 0; j < 3; ++j) {
      Point p = vertices_[v[j]], q = vertices_[v[(j + 1) % 3]], r = vertices_[v[(j + 2) % 3]];
      double c = dot(q - p, r - p) / (norm(q - p) * norm(r - p));
      mn = std::min(mn, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI);
    }
    return mn;
  }

  /// Builds facets, classifies edges, detects hanging nodes, and fills the
  /// adjacency tables.
  void connect() {
    struct SideUse {
      int tri, side;
    };
    std::map<std::pair<int, int>, std::vector<SideUse>> sides;
    for (int t = 0; t < n_triangles(); ++t)
      for (int j = 0; j < 3; ++j)
        sides[detail::sorted_pair(triangles_[t].v[j], triangles_[t].v[(j + 1) % 3])].push_back(
            {t, j});

    std::unordered_map<detail::PointKey, int, detail::PointKeyHash> pos_index;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      pos_index[{detail::bits_of(vertices_[i].x), detail::bits_of(vertices_[i].y)}] =
          static_cast<int>(i);

    // Detect split coarse sides: a side used once whose midpoint is an
    // existing vertex and whose halves are sides of other triangles.
    std::map<std::pair<int, int>, int> half_owner;  // half side -> coarse tri
    std::map<std::pair<int, int>, int> split_mid;   // coarse side -> midpoint vertex
    for (const auto& [key, uses] : sides) {
      if (uses.size() != 1) continue;
      Point m = midpoint(vertices_[key.first], vertices_[key.second]);
      auto it = pos_index.find({detail::bits_of(m.x), detail::bits_of(m.y)});
      if (it == pos_index.end()) continue;
      auto h1 = detail::sorted_pair(key.first, it->second);
      auto h2 = detail::sorted_pair(it->second, key.second);
      auto i1 = sides.find(h1), i2 = sides.find(h2);
      if (i1 == sides.end() || i2 == sides.end()) continue;
      if (i1->second.size() != 1 || i2->second.size() != 1)
        throw ValidationError("mesh is more than 1-irregular near a hanging node");
      half_owner[h1] = uses[0].tri;
      half_owner[h2] = uses[0].tri;
      split_mid[key] = it->second;
      hanging_nodes_.insert(it->second);
    }

    edges_.clear();
    std::set<std::pair<int, int>> emitted;
    auto emit = [&](std::pair<int, int> key, int t0, int t1, int coarse) {
      Edge e;
      e.a = key.first;
      e.b = key.second;
      e.tri_plus = (t1 < 0) ? t0 : std::min(t0, t1);
      e.tri_minus = (t1 < 0) ? -1 : std::max(t0, t1);
      e.coarse_tri = coarse;
      Point pa = vertices_[e.a], pb = vertices_[e.b];
      e.length = norm(pb - pa);
      Vec2 tang = (pb - pa) / e.length;
      e.normal = {tang.y, -tang.x};
      Point mid = midpoint(pa, pb);
      if (dot(e.normal, centroid(e.tri_plus) - mid) > 0.0) e.normal = e.normal * -1.0;
      if (t1 >= 0) {
        e.cls = EdgeClass::Interior;
      } else {
        auto tag = boundary_tags_.find(key);
        if (tag == boundary_tags_.end())
          throw ValidationError("untagged boundary edge (" + std::to_string(key.first) + ", " +
                                std::to_string(key.second) + ")");
        e.cls = (tag->second == BoundaryTag::G1) ? EdgeClass::Gamma1 : EdgeClass::Gamma2;
      }
      edges_.push_back(e);
      emitted.insert(key);
    };

    for (int t = 0; t < n_triangles(); ++t) {
      for (int j = 0; j < 3; ++j) {
        auto key = detail::sorted_pair(triangles_[t].v[j], triangles_[t].v[(j + 1) % 3]);
        if (emitted.count(key)) continue;
        auto sp = split_mid.find(key);
        if (sp != split_mid.end()) {
          // Visiting the coarse side: emit both halves now.
          for (auto half : {detail::sorted_pair(key.first, sp->second),
                            detail::sorted_pair(sp->second, key.second)}) {
            if (emitted.count(half)) continue;
            emit(half, sides[half][0].tri, t, t);
          }
          emitted.insert(key);
          continue;
        }
        auto ho = half_owner.find(key);
        const auto& uses = sides[key];
        if (ho != half_owner.end()) {
          emit(key, uses[0].tri, ho->second, ho->second);
        } else if (uses.size() == 2) {
          emit(key, uses[0].tri, uses[1].tri, -1);
        } else if (uses.size() == 1) {
          emit(key, uses[0].tri, -1, -1);
        } else {
          throw ValidationError("side shared by more than two triangles");
        }
      }
    }

    interior_edges_.clear();
    gamma1_edges_.clear();
    gamma2_edges_.clear();
    edges_of_tri_.assign(n_triangles(), {});
    gamma2_pos_.assign(n_edges(), -1);
    for (int e = 0; e < n_edges(); ++e) {
      switch (edges_[e].cls) {
        case EdgeClass::Interior: interior_edges_.push_back(e); break;
        case EdgeClass::Gamma1: gamma1_edges_.push_back(e); break;
        case EdgeClass::Gamma2:
          gamma2_pos_[e] = static_cast<int>(gamma2_edges_.size());
          gamma2_edges_.push_back(e);
          break;
      }
      edges_of_tri_[edges_[e].tri_plus].push_back(e);
      if (edges_[e].tri_minus >= 0) edges_of_tri_[edges_[e].tri_minus].push_back(e);
    }

    edge_index_.clear();
    for (int e = 0; e < n_edges(); ++e)
      edge_index_[detail::sorted_pair(edges_[e].a, edges_[e].b)] = e;

    node_set_.assign(n_triangles(), {});
    node_to_tris_.assign(n_vertices(), {});
    for (int t = 0; t < n_triangles(); ++t) {
      std::set<int> ns(triangles_[t].v.begin(), triangles_[t].v.end());
      for (int e : edges_of_tri_[t]) {
        ns.insert(edges_[e].a);
        ns.insert(edges_[e].b);
      }
      node_set_[t].assign(ns.begin(), ns.end());
      for (int n : node_set_[t]) node_to_tris_[n].push_back(t);
    }

    node_patches_.assign(n_vertices(), {});
    for (int t = 0; t < n_triangles(); ++t)
      for (int vid : triangles_[t].v) node_patches_[vid].push_back(t);

    gamma1_nodes_.clear();
    for (int e : gamma1_edges_) {
      gamma1_nodes_.insert(edges_[e].a);
      gamma1_nodes_.insert(edges_[e].b);
    }
  }

  void validate() const {
    if (gamma1_edges_.empty()) throw ValidationError("Gamma_1 part of the boundary is empty");
    for (const auto& [key, tag] : boundary_tags_) {
      (void)tag;
      auto it = edge_index_.find(key);
      if (it == edge_index_.end() || edges_[it->second].tri_minus >= 0)
        throw ValidationError("boundary tag refers to a non-boundary side (" +
                              std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
    }
    for (std::size_t t = 0; t < triangles_.size(); ++t)
      if (triangle_min_angle(t) < min_angle_deg_ - 1e-9)
        throw ValidationError("triangle " + std::to_string(t) + " violates the minimal angle " +
                              std::to_string(min_angle_deg_) + " deg");
  }
};

}  // namespace dgc
