#pragma once

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "dgcontact/errors.hpp"
#include "dgcontact/field.hpp"
#include "dgcontact/mesh.hpp"
#include "dgcontact/multiplier.hpp"
#include "dgcontact/quadrature.hpp"
#include "dgcontact/solver.hpp"

namespace dgc {

/// Conforming P1 discretization of a(u,v) = (grad u, grad v) + (u, v) with
/// homogeneous Dirichlet data on Gamma_1 eliminated. Used for reference
/// solutions (fine-grid VI solves) and the auxiliary linear problem of the
/// bridge inequality. The factorization is computed once and cached.
class ConformingSystem {
 public:
  ConformingSystem(const Mesh& mesh, const std::function<double(Point)>& f, double g)
      : mesh_(&mesh), g_(g) {
    if (!mesh.hanging_nodes().empty())
      throw ValidationError("conforming solver requires a conforming mesh");
    int nv = mesh.n_vertices();
    index_.assign(nv, -1);
    std::vector<char> dirichlet(nv, 0);
    for (int v : mesh.gamma1_nodes()) dirichlet[v] = 1;
    for (int v = 0; v < nv; ++v)
      if (!dirichlet[v]) {
        index_[v] = static_cast<int>(free_.size());
        free_.push_back(v);
      }
    int n = static_cast<int>(free_.size());

    std::vector<Triplet> trip;
    load_ = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      auto gr = mesh.basis_gradients(t);
      for (int i = 0; i < 3; ++i) {
        int gi = index_[tri.v[i]];
        if (gi < 0) continue;
        for (int j = 0; j < 3; ++j) {
          int gj = index_[tri.v[j]];
          if (gj < 0) continue;
          double kij = dot(gr[i], gr[j]) * tri.area + tri.area / 12.0 * (i == j ? 2.0 : 1.0);
          trip.emplace_back(gi, gj, kij);
        }
        const auto& verts = mesh.vertices();
        for (const auto& qp : triangle_rule()) {
          Point x = qp.l1 * verts[tri.v[0]] + qp.l2 * verts[tri.v[1]] + qp.l3 * verts[tri.v[2]];
          double l = i == 0 ? qp.l1 : (i == 1 ? qp.l2 : qp.l3);
          load_[gi] += f(x) * qp.w * tri.area * l;
        }
      }
    }
    A_.resize(n, n);
    A_.setFromTriplets(trip.begin(), trip.end());

    const auto& g2 = mesh.gamma2_edges();
    std::vector<Triplet> tt, gt;
    for (std::size_t pos = 0; pos < g2.size(); ++pos) {
      int e = g2[pos];
      const Edge& ed = mesh.edges()[e];
      for (int q = 0; q < kEdgeQuadPoints; ++q) {
        Point x = mesh.edge_point(e, edge_rule()[q].s);
        auto l = mesh.barycentric(ed.tri_plus, x);
        double w = edge_rule()[q].w * ed.length;
        for (int j = 0; j < 3; ++j) {
          int gj = index_[mesh.triangles()[ed.tri_plus].v[j]];
          if (gj < 0) continue;
          tt.emplace_back(static_cast<int>(3 * pos + q), gj, l[j]);
          gt.emplace_back(gj, static_cast<int>(3 * pos + q), g * w * l[j]);
        }
      }
    }
    gamma2_trace_.resize(3 * static_cast<int>(g2.size()), n);
    gamma2_trace_.setFromTriplets(tt.begin(), tt.end());
    boundary_coupling_.resize(n, 3 * static_cast<int>(g2.size()));
    boundary_coupling_.setFromTriplets(gt.begin(), gt.end());

    llt_ = std::make_unique<Eigen::SimplicialLLT<SparseMatrix>>(A_);
    if (llt_->info() != Eigen::Success)
      throw LinearSolverError("conforming Cholesky factorization failed");
  }

  const Mesh& mesh() const { return *mesh_; }
  int n_free() const { return static_cast<int>(free_.size()); }

  /// Nodal vector over all vertices (zeros on Gamma_1) from free dofs.
  Eigen::VectorXd expand(const Eigen::VectorXd& x) const {
    Eigen::VectorXd nodal = Eigen::VectorXd::Zero(mesh_->n_vertices());
    for (std::size_t i = 0; i < free_.size(); ++i) nodal[free_[i]] = x[i];
    return nodal;
  }

  BrokenField to_broken(const Eigen::VectorXd& nodal) const {
    BrokenField out(*mesh_);
    for (int t = 0; t < mesh_->n_triangles(); ++t)
      for (int j = 0; j < 3; ++j) out.coeff(t, j) = nodal[mesh_->triangles()[t].v[j]];
    return out;
  }

  /// Linear Neumann problem: a(z, v) = (f, v) - int_{Gamma_2} g lambda v ds
  /// with lambda given at the Gamma_2 Gauss points of this mesh. This is the
  /// discretization of Eq. pde2 for the bridge inequality.
  Eigen::VectorXd solve_linear(const Eigen::VectorXd& lambda_gauss) const {
    Eigen::VectorXd x = llt_->solve(load_ - boundary_coupling_ * lambda_gauss);
    if (llt_->info() != Eigen::Success) throw LinearSolverError("conforming linear solve failed");
    return expand(x);
  }

  struct VIResult {
    Eigen::VectorXd nodal;
    Multiplier lambda;
    UzawaReport report;
  };

  /// Uzawa iteration on the conforming discretization of the VI.
  VIResult solve_vi(const UzawaParams& params = {}) const {
    params.validate();
    double rho = params.rho > 0.0 ? params.rho : 1.0 / (g_ * g_);
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(boundary_coupling_.cols());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_free());
    UzawaReport report;
    for (int it = 1; it <= params.max_iter; ++it) {
      Eigen::VectorXd x_new = llt_->solve(load_ - boundary_coupling_ * lambda);
      Eigen::VectorXd trace = gamma2_trace_ * x_new;
      Eigen::VectorXd lambda_new(lambda.size());
      for (int k = 0; k < lambda.size(); ++k)
        lambda_new[k] = std::clamp(lambda[k] + rho * g_ * trace[k], -1.0, 1.0);
      double du = it == 1 ? 1.0 : (x_new - x).lpNorm<Eigen::Infinity>();
      double dl = lambda.size() ? (lambda_new - lambda).lpNorm<Eigen::Infinity>() : 0.0;
      x = x_new;
      lambda = lambda_new;
      report.iterations = it;
      report.increment_u = du;
      report.increment_lambda = dl;
      if (du <= params.tol && dl <= params.tol) {
        double comp = 0.0;
        for (int k = 0; k < lambda.size(); ++k) {
          double target = std::clamp(lambda[k] + g_ * trace[k], -1.0, 1.0);
          comp = std::max(comp, std::abs(lambda[k] - target));
        }
        report.complementarity = comp;
        if (comp <= params.tol_c) {
          report.converged = true;
          VIResult res{expand(x), Multiplier(*mesh_, g_), report};
          res.lambda.values() = lambda;
          return res;
        }
      }
    }
    throw NonconvergenceError("conforming Uzawa did not converge in " +
                              std::to_string(params.max_iter) + " iterations");
  }

 private:
  const Mesh* mesh_;
  double g_;
  std::vector<int> free_, index_;
  SparseMatrix A_, gamma2_trace_, boundary_coupling_;
  Eigen::VectorXd load_;
  std::unique_ptr<Eigen::SimplicialLLT<SparseMatrix>> llt_;
};

}  // namespace dgc
