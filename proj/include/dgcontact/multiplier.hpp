#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dgcontact/errors.hpp"
#include "dgcontact/mesh.hpp"
#include "dgcontact/quadrature.hpp"

namespace dgc {

/// Discrete friction multiplier lambda_h: values at the Gauss points of the
/// Gamma_2 edges, each in [-1, 1] once the solver has converged. Storage
/// order follows mesh.gamma2_edges(): 3 values per edge.
class Multiplier {
 public:
  Multiplier(const Mesh& mesh, double g)
      : mesh_(&mesh), g_(g), values_(Eigen::VectorXd::Zero(3 * mesh.gamma2_edges().size())) {}

  const Mesh& mesh() const { return *mesh_; }
  double friction_bound() const { return g_; }
  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

  double at(int gamma2_pos, int q) const { return values_[3 * gamma2_pos + q]; }
  double& at(int gamma2_pos, int q) { return values_[3 * gamma2_pos + q]; }

  /// Evaluates the per-edge quadratic Lagrange interpolant through the three
  /// Gauss values at a point x on Gamma_2. Used when transferring a
  /// multiplier between meshes.
  double evaluate(const Point& x) const {
    const auto& g2 = mesh_->gamma2_edges();
    int best = -1;
    double best_dist = 1e300, best_s = 0.0;
    for (std::size_t pos = 0; pos < g2.size(); ++pos) {
      const Edge& e = mesh_->edges()[g2[pos]];
      Point a = mesh_->vertices()[e.a], b = mesh_->vertices()[e.b];
      Vec2 d = b - a;
      double s = dot(x - a, d) / dot(d, d);
      double sc = std::clamp(s, 0.0, 1.0);
      Point proj = a + sc * d;
      double dist = norm(x - proj);
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(pos);
        best_s = sc;
      }
    }
    if (best < 0 || best_dist > 1e-9) throw ValidationError("multiplier evaluated off Gamma_2");
    // quadratic Lagrange basis at the Gauss abscissae
    const auto& r = edge_rule();
    double s0 = r[0].s, s1 = r[1].s, s2 = r[2].s, s = best_s;
    double l0 = (s - s1) * (s - s2) / ((s0 - s1) * (s0 - s2));
    double l1 = (s - s0) * (s - s2) / ((s1 - s0) * (s1 - s2));
    double l2 = (s - s0) * (s - s1) / ((s2 - s0) * (s2 - s1));
    return l0 * at(best, 0) + l1 * at(best, 1) + l2 * at(best, 2);
  }

  /// Fills values by sampling a closed-form multiplier at the Gauss points.
  template <class F>
  static Multiplier sample(const Mesh& mesh, double g, F&& lambda) {
    Multiplier m(mesh, g);
    const auto& g2 = mesh.gamma2_edges();
    for (std::size_t pos = 0; pos < g2.size(); ++pos)
      for (int q = 0; q < kEdgeQuadPoints; ++q)
        m.at(static_cast<int>(pos), q) = lambda(mesh.edge_point(g2[pos], edge_rule()[q].s));
    return m;
  }

  double max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }

  /// L2(Gamma_2) norm of the Gauss-point data.
  double l2_gamma2() const {
    const auto& g2 = mesh_->gamma2_edges();
    double sum = 0.0;
    for (std::size_t pos = 0; pos < g2.size(); ++pos)
      for (int q = 0; q < kEdgeQuadPoints; ++q) {
        double v = at(static_cast<int>(pos), q);
        sum += edge_rule()[q].w * mesh_->edges()[g2[pos]].length * v * v;
      }
    return std::sqrt(sum);
  }

 private:
  const Mesh* mesh_;
  double g_;
  Eigen::VectorXd values_;
};

}  // namespace dgc
