#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "dgcontact/errors.hpp"
#include "dgcontact/field.hpp"
#include "dgcontact/mesh.hpp"
#include "dgcontact/multiplier.hpp"
#include "dgcontact/quadrature.hpp"

namespace dgc {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Parameters of the LDG form: penalty number eta_e (weight eta_e / h_e on
/// every edge of E_h^0) and the constant flux vector beta on interior edges.
struct LdgConfig {
  double eta_e = 10.0;
  Vec2 beta{0.0, 0.0};

  void validate() const {
    if (!(eta_e > 0.0)) throw ConfigError("penalty eta_e must be positive");
  }
};

namespace detail {

/// Local P1 basis values of both incident triangles at the edge Gauss points.
struct EdgeBasis {
  // [side][gauss][local node]; side 0 = plus, side 1 = minus (unused on boundary)
  double phi[2][kEdgeQuadPoints][3];
  std::array<Vec2, 3> grad[2];
  double sign[2] = {1.0, -1.0};  // jump orientation relative to n+
  int tri[2] = {-1, -1};
  int n_sides = 1;
};

inline EdgeBasis edge_basis(const Mesh& mesh, int e) {
  const Edge& ed = mesh.edges()[e];
  EdgeBasis b;
  b.tri[0] = ed.tri_plus;
  b.tri[1] = ed.tri_minus;
  b.n_sides = ed.tri_minus >= 0 ? 2 : 1;
  for (int s = 0; s < b.n_sides; ++s) {
    b.grad[s] = mesh.basis_gradients(b.tri[s]);
    for (int q = 0; q < kEdgeQuadPoints; ++q) {
      auto l = mesh.barycentric(b.tri[s], mesh.edge_point(e, edge_rule()[q].s));
      for (int j = 0; j < 3; ++j) b.phi[s][q][j] = l[j];
    }
  }
  return b;
}

/// 3x3 inverse P1 mass matrix on triangle t, times a vector.
inline Eigen::Matrix3d inv_mass(double area) {
  Eigen::Matrix3d c;
  c << 3, -1, -1, -1, 3, -1, -1, -1, 3;
  return c * (3.0 / area);
}

}  // namespace detail

/// Sparse operators realizing the lifting definitions: R0 maps vector-valued
/// edge data on E_h^0 (3 Gauss values x 2 components per edge) to the
/// coefficients of r_0(q) in W_h, and L maps scalar edge data on E_h^i to
/// the coefficients of l(v). Edge-data columns are ordered interior edges
/// first, then Gamma_1 edges, matching `lifting_edge_order`.
struct LiftingOperators {
  SparseMatrix R0;  // (6 nT) x (6 |E0|)
  SparseMatrix L;   // (6 nT) x (3 |Ei|)
  std::vector<int> e0_edges;  // E_h^0 edge ids in column order
};

inline LiftingOperators build_liftings(const Mesh& mesh, const LdgConfig& config) {
  config.validate();
  int nt = mesh.n_triangles();
  std::vector<int> e0 = mesh.interior_edges();
  e0.insert(e0.end(), mesh.gamma1_edges().begin(), mesh.gamma1_edges().end());

  // B0: (6 nT) x (6 |E0|) with (B0 q) . w = -int_{E0} q . {w}
  std::vector<Triplet> b0, bl;
  for (std::size_t pos = 0; pos < e0.size(); ++pos) {
    int e = e0[pos];
    const Edge& ed = mesh.edges()[e];
    auto basis = detail::edge_basis(mesh, e);
    double avg = basis.n_sides == 2 ? 0.5 : 1.0;
    for (int q = 0; q < kEdgeQuadPoints; ++q) {
      double w = edge_rule()[q].w * ed.length;
      for (int s = 0; s < basis.n_sides; ++s)
        for (int j = 0; j < 3; ++j)
          for (int c = 0; c < 2; ++c)
            b0.emplace_back(6 * basis.tri[s] + 2 * j + c,
                            static_cast<int>(6 * pos + 2 * q + c),
                            -w * avg * basis.phi[s][q][j]);
    }
  }
  const auto& ei = mesh.interior_edges();
  for (std::size_t pos = 0; pos < ei.size(); ++pos) {
    int e = ei[pos];
    const Edge& ed = mesh.edges()[e];
    auto basis = detail::edge_basis(mesh, e);
    for (int q = 0; q < kEdgeQuadPoints; ++q) {
      double w = edge_rule()[q].w * ed.length;
      // [w_h] = (w+ - w-) . n+
      for (int s = 0; s < 2; ++s)
        for (int j = 0; j < 3; ++j)
          for (int c = 0; c < 2; ++c) {
            double nc = c == 0 ? ed.normal.x : ed.normal.y;
            bl.emplace_back(6 * basis.tri[s] + 2 * j + c,
                            static_cast<int>(3 * pos + q),
                            -w * basis.sign[s] * nc * basis.phi[s][q][j]);
          }
    }
  }

  SparseMatrix B0(6 * nt, 6 * static_cast<int>(e0.size()));
  B0.setFromTriplets(b0.begin(), b0.end());
  SparseMatrix Bl(6 * nt, 3 * static_cast<int>(ei.size()));
  Bl.setFromTriplets(bl.begin(), bl.end());

  // block-diagonal inverse vector mass
  std::vector<Triplet> mi;
  for (int t = 0; t < nt; ++t) {
    Eigen::Matrix3d inv = detail::inv_mass(mesh.triangles()[t].area);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int c = 0; c < 2; ++c) mi.emplace_back(6 * t + 2 * i + c, 6 * t + 2 * j + c, inv(i, j));
  }
  SparseMatrix Minv(6 * nt, 6 * nt);
  Minv.setFromTriplets(mi.begin(), mi.end());

  LiftingOperators ops;
  ops.R0 = Minv * B0;
  ops.L = Minv * Bl;
  ops.e0_edges = std::move(e0);
  return ops;
}

/// The assembled discrete system: A realizes B_h on broken P1 coefficients,
/// `load` realizes (f, .), `gamma2_trace` samples a coefficient vector at
/// the Gamma_2 Gauss points, and `boundary_coupling` maps multiplier Gauss
/// values to the load contribution of int_{Gamma_2} g lambda v ds.
struct AssembledSystem {
  const Mesh* mesh = nullptr;
  LdgConfig config;
  double g = 1.0;
  SparseMatrix A;
  Eigen::VectorXd load;
  SparseMatrix gamma2_trace;      // (3 |E2|) x (3 nT)
  SparseMatrix boundary_coupling; // (3 nT) x (3 |E2|), includes g and weights

  int n_dofs() const { return static_cast<int>(A.rows()); }
};

inline Eigen::VectorXd boundary_functional(const AssembledSystem& sys, const Multiplier& lambda) {
  return sys.boundary_coupling * lambda.values();
}

inline AssembledSystem assemble(const Mesh& mesh, const LdgConfig& config,
                                const std::function<double(Point)>& f, double g) {
  config.validate();
  if (!(g > 0.0)) throw ConfigError("friction bound g must be positive");
  int nt = mesh.n_triangles();
  int n = 3 * nt;
  std::vector<Triplet> trip;

  // volume part: int (grad u . grad v + u v)
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    auto gr = mesh.basis_gradients(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double kij = dot(gr[i], gr[j]) * tri.area;
        double mij = tri.area / 12.0 * (i == j ? 2.0 : 1.0);
        trip.emplace_back(3 * t + i, 3 * t + j, kij + mij);
      }
  }

  // consistency + penalty terms on E_h^0, beta terms on E_h^i
  std::vector<int> e0 = mesh.interior_edges();
  e0.insert(e0.end(), mesh.gamma1_edges().begin(), mesh.gamma1_edges().end());
  for (int e : e0) {
    const Edge& ed = mesh.edges()[e];
    auto basis = detail::edge_basis(mesh, e);
    bool interior = basis.n_sides == 2;
    double avg = interior ? 0.5 : 1.0;
    double beta_n = dot(config.beta, ed.normal);
    for (int q = 0; q < kEdgeQuadPoints; ++q) {
      double w = edge_rule()[q].w * ed.length;
      for (int su = 0; su < basis.n_sides; ++su)
        for (int i = 0; i < 3; ++i) {
          double jump_u = basis.sign[su] * basis.phi[su][q][i];  // coefficient of n+
          int udof = 3 * basis.tri[su] + i;
          for (int sv = 0; sv < basis.n_sides; ++sv)
            for (int j = 0; j < 3; ++j) {
              int vdof = 3 * basis.tri[sv] + j;
              double jump_v = basis.sign[sv] * basis.phi[sv][q][j];
              double gradn_v = dot(basis.grad[sv][j], ed.normal);
              double gradn_u = dot(basis.grad[su][i], ed.normal);
              double a = 0.0;
              // -int [u] . {grad v}  and  -int {grad u} . [v]
              a -= w * jump_u * avg * gradn_v;
              a -= w * avg * gradn_u * jump_v;
              // penalty eta_e / h_e int [u].[v]
              a += w * (config.eta_e / ed.length) * jump_u * jump_v;
              if (interior) {
                // -int beta.[u] [grad v]  and  -int [grad u] beta.[v]
                a -= w * beta_n * jump_u * basis.sign[sv] * gradn_v;
                a -= w * basis.sign[su] * gradn_u * beta_n * jump_v;
              }
              trip.emplace_back(vdof, udof, a);
            }
        }
    }
  }

  AssembledSystem sys;
  sys.mesh = &mesh;
  sys.config = config;
  sys.g = g;
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trip.begin(), trip.end());

  // stabilization (r_0([u]) + l(beta.[u]), r_0([v]) + l(beta.[v])):
  // S = J^T M^{-1} J with (J u) . w = -int_{E0} [u].{w} - int_{Ei} (beta.[u]) [w]
  {
    std::vector<Triplet> jt;
    for (int e : e0) {
      const Edge& ed = mesh.edges()[e];
      auto basis = detail::edge_basis(mesh, e);
      bool interior = basis.n_sides == 2;
      double avg = interior ? 0.5 : 1.0;
      double beta_n = dot(config.beta, ed.normal);
      for (int q = 0; q < kEdgeQuadPoints; ++q) {
        double w = edge_rule()[q].w * ed.length;
        for (int su = 0; su < basis.n_sides; ++su)
          for (int i = 0; i < 3; ++i) {
            double jump_u = basis.sign[su] * basis.phi[su][q][i];
            int udof = 3 * basis.tri[su] + i;
            for (int sw = 0; sw < basis.n_sides; ++sw)
              for (int j = 0; j < 3; ++j)
                for (int c = 0; c < 2; ++c) {
                  double nc = c == 0 ? ed.normal.x : ed.normal.y;
                  double v = -w * jump_u * nc * avg * basis.phi[sw][q][j];
                  if (interior)  // beta term: -(beta.[u]) [w], [w] = (w+-w-).n+
                    v -= w * beta_n * jump_u * basis.sign[sw] * nc * basis.phi[sw][q][j];
                  jt.emplace_back(6 * basis.tri[sw] + 2 * j + c, udof, v);
                }
          }
      }
    }
    SparseMatrix J(6 * nt, n);
    J.setFromTriplets(jt.begin(), jt.end());
    std::vector<Triplet> mi;
    for (int t = 0; t < nt; ++t) {
      Eigen::Matrix3d inv = detail::inv_mass(mesh.triangles()[t].area);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int c = 0; c < 2; ++c)
            mi.emplace_back(6 * t + 2 * i + c, 6 * t + 2 * j + c, inv(i, j));
    }
    SparseMatrix Minv(6 * nt, 6 * nt);
    Minv.setFromTriplets(mi.begin(), mi.end());
    sys.A = sys.A + SparseMatrix(J.transpose() * Minv * J);
  }

  // load vector
  sys.load.resize(n);
  sys.load.setZero();
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& verts = mesh.vertices();
    for (const auto& qp : triangle_rule()) {
      Point x = qp.l1 * verts[tri.v[0]] + qp.l2 * verts[tri.v[1]] + qp.l3 * verts[tri.v[2]];
      double fw = f(x) * qp.w * tri.area;
      sys.load[3 * t] += fw * qp.l1;
      sys.load[3 * t + 1] += fw * qp.l2;
      sys.load[3 * t + 2] += fw * qp.l3;
    }
  }

  // Gamma_2 trace and boundary coupling
  {
    const auto& g2 = mesh.gamma2_edges();
    std::vector<Triplet> tt, gt;
    for (std::size_t pos = 0; pos < g2.size(); ++pos) {
      int e = g2[pos];
      const Edge& ed = mesh.edges()[e];
      auto basis = detail::edge_basis(mesh, e);
      for (int q = 0; q < kEdgeQuadPoints; ++q) {
        double w = edge_rule()[q].w * ed.length;
        for (int j = 0; j < 3; ++j) {
          tt.emplace_back(static_cast<int>(3 * pos + q), 3 * ed.tri_plus + j, basis.phi[0][q][j]);
          gt.emplace_back(3 * ed.tri_plus + j, static_cast<int>(3 * pos + q),
                          g * w * basis.phi[0][q][j]);
        }
      }
    }
    sys.gamma2_trace.resize(3 * static_cast<int>(g2.size()), n);
    sys.gamma2_trace.setFromTriplets(tt.begin(), tt.end());
    sys.boundary_coupling.resize(n, 3 * static_cast<int>(g2.size()));
    sys.boundary_coupling.setFromTriplets(gt.begin(), gt.end());
  }

  sys.A.makeCompressed();
  return sys;
}

/// B_h(v, w) evaluated through the assembled operator.
inline double bilinear(const AssembledSystem& sys, const BrokenField& v, const BrokenField& w) {
  Eigen::Map<const Eigen::VectorXd> vv(v.data().data(), v.size());
  Eigen::Map<const Eigen::VectorXd> wv(w.data().data(), w.size());
  return wv.dot(sys.A * vv);
}

}  // namespace dgc
