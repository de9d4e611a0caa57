#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "dgcontact/mesh.hpp"
#include "dgcontact/quadrature.hpp"

namespace dgc {

/// Element-wise linear scalar field on a mesh; 3 nodal coefficients per
/// triangle (value at each vertex of K).
class BrokenField {
 public:
  explicit BrokenField(const Mesh& mesh) : mesh_(&mesh), coeffs_(3 * mesh.n_triangles(), 0.0) {}

  const Mesh& mesh() const { return *mesh_; }
  int size() const { return static_cast<int>(coeffs_.size()); }
  double& coeff(int t, int j) { return coeffs_[3 * t + j]; }
  double coeff(int t, int j) const { return coeffs_[3 * t + j]; }
  std::vector<double>& data() { return coeffs_; }
  const std::vector<double>& data() const { return coeffs_; }

  double value(int t, const Point& x) const {
    auto l = mesh_->barycentric(t, x);
    return l[0] * coeffs_[3 * t] + l[1] * coeffs_[3 * t + 1] + l[2] * coeffs_[3 * t + 2];
  }

  /// Broken gradient; constant on each triangle.
  Vec2 gradient(int t) const {
    auto g = mesh_->basis_gradients(t);
    return g[0] * coeffs_[3 * t] + g[1] * coeffs_[3 * t + 1] + g[2] * coeffs_[3 * t + 2];
  }

  static BrokenField interpolate(const Mesh& mesh, const std::function<double(Point)>& f) {
    BrokenField v(mesh);
    for (int t = 0; t < mesh.n_triangles(); ++t)
      for (int j = 0; j < 3; ++j) v.coeff(t, j) = f(mesh.vertices()[mesh.triangles()[t].v[j]]);
    return v;
  }

  /// Re-interpolation onto a mesh produced by refine() from this field's
  /// mesh; exact for P1 (nested spaces).
  BrokenField interpolate_to_child(const Mesh& child) const {
    BrokenField v(child);
    for (int t = 0; t < child.n_triangles(); ++t) {
      int p = child.triangles()[t].parent;
      for (int j = 0; j < 3; ++j)
        v.coeff(t, j) = value(p, child.vertices()[child.triangles()[t].v[j]]);
    }
    return v;
  }

 private:
  const Mesh* mesh_;
  std::vector<double> coeffs_;
};

/// Element-wise linear 2-vector field; 6 coefficients per triangle
/// (x then y component at each vertex).
class BrokenVectorField {
 public:
  explicit BrokenVectorField(const Mesh& mesh)
      : mesh_(&mesh), coeffs_(6 * mesh.n_triangles(), 0.0) {}

  const Mesh& mesh() const { return *mesh_; }
  int size() const { return static_cast<int>(coeffs_.size()); }
  double& coeff(int t, int j, int comp) { return coeffs_[6 * t + 2 * j + comp]; }
  double coeff(int t, int j, int comp) const { return coeffs_[6 * t + 2 * j + comp]; }
  std::vector<double>& data() { return coeffs_; }
  const std::vector<double>& data() const { return coeffs_; }

  Vec2 value(int t, const Point& x) const {
    auto l = mesh_->barycentric(t, x);
    Vec2 out{0.0, 0.0};
    for (int j = 0; j < 3; ++j) {
      out.x += l[j] * coeff(t, j, 0);
      out.y += l[j] * coeff(t, j, 1);
    }
    return out;
  }

 private:
  const Mesh* mesh_;
  std::vector<double> coeffs_;
};

/// Traces of a scalar broken field at the edge Gauss points. The jump of a
/// scalar is the 2-vector v+ n+ + v- n-; on boundary edges [v] = v n and
/// {v} = v.
struct ScalarEdgeTrace {
  std::array<Point, kEdgeQuadPoints> points;
  std::array<double, kEdgeQuadPoints> plus, minus;  // minus = plus on boundary
  std::array<Vec2, kEdgeQuadPoints> jump;
  std::array<double, kEdgeQuadPoints> average;
};

inline ScalarEdgeTrace jump_average(const BrokenField& v, int e) {
  const Mesh& mesh = v.mesh();
  const Edge& ed = mesh.edges()[e];
  ScalarEdgeTrace out;
  for (int q = 0; q < kEdgeQuadPoints; ++q) {
    Point x = mesh.edge_point(e, edge_rule()[q].s);
    out.points[q] = x;
    double vp = v.value(ed.tri_plus, x);
    if (ed.tri_minus >= 0) {
      double vm = v.value(ed.tri_minus, x);
      out.plus[q] = vp;
      out.minus[q] = vm;
      out.jump[q] = (vp - vm) * ed.normal;  // n- = -n+
      out.average[q] = 0.5 * (vp + vm);
    } else {
      out.plus[q] = out.minus[q] = vp;
      out.jump[q] = vp * ed.normal;
      out.average[q] = vp;
    }
  }
  return out;
}

/// Traces of a vector broken field; the jump of a vector is the scalar
/// q+ . n+ + q- . n-; on boundary edges {q} = q and [q] = q . n.
struct VectorEdgeTrace {
  std::array<Point, kEdgeQuadPoints> points;
  std::array<double, kEdgeQuadPoints> jump;
  std::array<Vec2, kEdgeQuadPoints> average;
};

inline VectorEdgeTrace jump_average(const BrokenVectorField& q, int e) {
  const Mesh& mesh = q.mesh();
  const Edge& ed = mesh.edges()[e];
  VectorEdgeTrace out;
  for (int i = 0; i < kEdgeQuadPoints; ++i) {
    Point x = mesh.edge_point(e, edge_rule()[i].s);
    out.points[i] = x;
    Vec2 qp = q.value(ed.tri_plus, x);
    if (ed.tri_minus >= 0) {
      Vec2 qm = q.value(ed.tri_minus, x);
      out.jump[i] = dot(qp - qm, ed.normal);
      out.average[i] = 0.5 * (qp + qm);
    } else {
      out.jump[i] = dot(qp, ed.normal);
      out.average[i] = qp;
    }
  }
  return out;
}

inline double integrate_element(const Mesh& mesh, int t,
                                const std::function<double(Point)>& f) {
  const auto& tri = mesh.triangles()[t];
  const auto& verts = mesh.vertices();
  double sum = 0.0;
  for (const auto& qp : triangle_rule()) {
    Point x = qp.l1 * verts[tri.v[0]] + qp.l2 * verts[tri.v[1]] + qp.l3 * verts[tri.v[2]];
    sum += qp.w * f(x);
  }
  return sum * tri.area;
}

inline double integrate_edge(const Mesh& mesh, int e, const std::function<double(Point)>& f) {
  double sum = 0.0;
  for (const auto& qp : edge_rule()) sum += qp.w * f(mesh.edge_point(e, qp.s));
  return sum * mesh.edges()[e].length;
}

struct BrokenNorms {
  double l2 = 0.0;      // ||v||_{0,h}
  double h1_semi = 0.0; // |v|_{1,h}
  double h1 = 0.0;      // ||v||_{1,h}
};

inline BrokenNorms broken_norms(const BrokenField& v) {
  const Mesh& mesh = v.mesh();
  double l2sq = 0.0, semisq = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    l2sq += integrate_element(mesh, t, [&](Point x) {
      double w = v.value(t, x);
      return w * w;
    });
    Vec2 g = v.gradient(t);
    semisq += dot(g, g) * mesh.triangles()[t].area;
  }
  return {std::sqrt(l2sq), std::sqrt(semisq), std::sqrt(l2sq + semisq)};
}

}  // namespace dgc
