#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "dgcontact/assembly.hpp"
#include "dgcontact/field.hpp"
#include "dgcontact/mesh.hpp"
#include "dgcontact/multiplier.hpp"

namespace dgc {

/// Per-element residual estimators eta_K, jump estimators eta_dK, and the
/// oscillation terms: osc_f per element (h_K ||f - fbar||_K) and osc_lambda
/// per Gamma_2 edge (h_e^{1/2} ||lambda_h - lambdabar_h||_e).
struct LocalEstimate {
  std::vector<double> eta_K;
  std::vector<double> eta_dK;
  std::vector<double> osc_f;
  std::vector<double> osc_lambda;  // indexed like mesh.gamma2_edges()
  double eta_tot = 0.0;

  double indicator(int t) const { return eta_K[t] * eta_K[t] + eta_dK[t] * eta_dK[t]; }
};

/// R_K = Delta u_h - u_h + f; the Laplacian vanishes for piecewise linears.
inline std::function<double(Point)> interior_residual(const BrokenField& u_h,
                                                      std::function<double(Point)> f, int K) {
  return [&u_h, f = std::move(f), K](Point x) { return f(x) - u_h.value(K, x); };
}

/// Values of R_e at the edge Gauss points. Interior: normal-flux jump
/// [grad u_h] (constant along the edge). Gamma_2: grad u_h . n + g lambda_h.
inline std::array<double, kEdgeQuadPoints> edge_residual(const Mesh& mesh, const BrokenField& u_h,
                                                         const Multiplier* lambda_h, double g,
                                                         int e) {
  const Edge& ed = mesh.edges()[e];
  std::array<double, kEdgeQuadPoints> r{};
  if (ed.cls == EdgeClass::Interior) {
    double jump = dot(u_h.gradient(ed.tri_plus) - u_h.gradient(ed.tri_minus), ed.normal);
    r.fill(jump);
    return r;
  }
  if (ed.cls == EdgeClass::Gamma2) {
    double flux = dot(u_h.gradient(ed.tri_plus), ed.normal);
    int pos = mesh.gamma2_position(e);
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      r[q] = flux + g * (lambda_h ? lambda_h->at(pos, q) : 0.0);
    return r;
  }
  throw ValidationError("edge residual requested on a Gamma_1 edge");
}

/// h_K ||f - fbar||_K with fbar from the weighted nodal averages of Eq. f_h:
/// f^i = (f, phi_i)_K / (1, phi_i)_K, and (1, phi_i)_K = |K| / 3.
inline std::vector<double> data_oscillation(const Mesh& mesh,
                                            const std::function<double(Point)>& f) {
  std::vector<double> osc(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& v = mesh.vertices();
    std::array<double, 3> fi{};
    for (const auto& qp : triangle_rule()) {
      Point x = qp.l1 * v[tri.v[0]] + qp.l2 * v[tri.v[1]] + qp.l3 * v[tri.v[2]];
      double fw = f(x) * qp.w * tri.area;
      fi[0] += fw * qp.l1;
      fi[1] += fw * qp.l2;
      fi[2] += fw * qp.l3;
    }
    for (double& c : fi) c /= tri.area / 3.0;
    double err2 = 0.0;
    for (const auto& qp : triangle_rule()) {
      Point x = qp.l1 * v[tri.v[0]] + qp.l2 * v[tri.v[1]] + qp.l3 * v[tri.v[2]];
      double fbar = fi[0] * qp.l1 + fi[1] * qp.l2 + fi[2] * qp.l3;
      double d = f(x) - fbar;
      err2 += qp.w * tri.area * d * d;
    }
    osc[t] = tri.diameter * std::sqrt(err2);
  }
  return osc;
}

inline LocalEstimate local_estimates(const Mesh& mesh, const BrokenField& u_h,
                                     const Multiplier& lambda_h,
                                     const std::function<double(Point)>& f, double g) {
  int nt = mesh.n_triangles();
  LocalEstimate est;
  est.eta_K.assign(nt, 0.0);
  est.eta_dK.assign(nt, 0.0);
  est.osc_f = data_oscillation(mesh, f);

  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    auto rk = interior_residual(u_h, f, t);
    double vol2 =
        integrate_element(mesh, t, [&](Point x) { return rk(x) * rk(x); });
    double eta2 = tri.diameter * tri.diameter * vol2;
    double jump2 = 0.0;
    for (int e : mesh.edges_of(t)) {
      const Edge& ed = mesh.edges()[e];
      switch (ed.cls) {
        case EdgeClass::Interior: {
          auto re = edge_residual(mesh, u_h, &lambda_h, g, e);
          double r2 = 0.0;
          for (int q = 0; q < kEdgeQuadPoints; ++q)
            r2 += edge_rule()[q].w * ed.length * re[q] * re[q];
          eta2 += 0.5 * ed.length * r2;
          auto tr = jump_average(u_h, e);
          double j2 = 0.0;
          for (int q = 0; q < kEdgeQuadPoints; ++q)
            j2 += edge_rule()[q].w * ed.length * dot(tr.jump[q], tr.jump[q]);
          jump2 += 0.5 / ed.length * j2;
          break;
        }
        case EdgeClass::Gamma2: {
          auto re = edge_residual(mesh, u_h, &lambda_h, g, e);
          double r2 = 0.0;
          for (int q = 0; q < kEdgeQuadPoints; ++q)
            r2 += edge_rule()[q].w * ed.length * re[q] * re[q];
          eta2 += ed.length * r2;
          break;
        }
        case EdgeClass::Gamma1: {
          auto tr = jump_average(u_h, e);
          double j2 = 0.0;
          for (int q = 0; q < kEdgeQuadPoints; ++q)
            j2 += edge_rule()[q].w * ed.length * dot(tr.jump[q], tr.jump[q]);
          jump2 += 1.0 / ed.length * j2;
          break;
        }
      }
    }
    est.eta_K[t] = std::sqrt(eta2);
    est.eta_dK[t] = std::sqrt(jump2);
  }

  const auto& g2 = mesh.gamma2_edges();
  est.osc_lambda.assign(g2.size(), 0.0);
  for (std::size_t pos = 0; pos < g2.size(); ++pos) {
    const Edge& ed = mesh.edges()[g2[pos]];
    double mean = 0.0;
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      mean += edge_rule()[q].w * lambda_h.at(static_cast<int>(pos), q);
    double d2 = 0.0;
    for (int q = 0; q < kEdgeQuadPoints; ++q) {
      double d = lambda_h.at(static_cast<int>(pos), q) - mean;
      d2 += edge_rule()[q].w * ed.length * d * d;
    }
    est.osc_lambda[pos] = std::sqrt(ed.length) * std::sqrt(d2);
  }

  double tot2 = 0.0;
  for (int t = 0; t < nt; ++t) tot2 += est.indicator(t);
  est.eta_tot = std::sqrt(tot2);
  return est;
}

/// |mu|_{*,gamma,h} on the given mesh: solves the auxiliary problem
/// a_{omega,h}(w, v) = int_gamma g mu v ds over the broken P1 space and
/// returns ||w||_{1,omega,h}. Since a_{omega,h} carries no coupling terms
/// the solve decouples into 3x3 SPD systems per element of omega.
inline double dual_norm(const Mesh& mesh, const Multiplier& mu, const std::vector<int>& gamma,
                        const std::vector<int>& omega) {
  std::vector<char> in_omega(mesh.n_triangles(), 0);
  for (int t : omega) in_omega[t] = 1;

  // local load vectors b_K = int_gamma g mu phi_j ds
  std::vector<Eigen::Vector3d> b(mesh.n_triangles(), Eigen::Vector3d::Zero());
  double gg = mu.friction_bound();
  for (int e : gamma) {
    const Edge& ed = mesh.edges()[e];
    if (ed.cls != EdgeClass::Gamma2) throw ValidationError("gamma must consist of Gamma_2 edges");
    int t = ed.tri_plus;
    if (!in_omega[t]) throw ValidationError("omega must contain the elements adjacent to gamma");
    int pos = mesh.gamma2_position(e);
    for (int q = 0; q < kEdgeQuadPoints; ++q) {
      Point x = mesh.edge_point(e, edge_rule()[q].s);
      auto l = mesh.barycentric(t, x);
      double w = edge_rule()[q].w * ed.length * gg * mu.at(pos, q);
      for (int j = 0; j < 3; ++j) b[t][j] += w * l[j];
    }
  }

  double norm2 = 0.0;
  for (int t : omega) {
    if (b[t].isZero()) continue;
    const auto& tri = mesh.triangles()[t];
    auto gr = mesh.basis_gradients(t);
    Eigen::Matrix3d A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        A(i, j) = dot(gr[i], gr[j]) * tri.area + tri.area / 12.0 * (i == j ? 2.0 : 1.0);
    norm2 += b[t].dot(A.ldlt().solve(b[t]));
  }
  return std::sqrt(norm2);
}

/// |mu|_{*,h}: omega = Omega, gamma = Gamma_2.
inline double dual_norm(const Mesh& mesh, const Multiplier& mu) {
  std::vector<int> omega(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) omega[t] = t;
  return dual_norm(mesh, mu, mesh.gamma2_edges(), omega);
}

/// |mu|_{*,e,h} with omega = omega_e, matching the locality of Eq. normg.
inline double dual_norm_edge(const Mesh& mesh, const Multiplier& mu, int e) {
  return dual_norm(mesh, mu, {e}, mesh.patch_of_edge(e));
}

}  // namespace dgc
