#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dgcontact/adaptivity.hpp"
#include "dgcontact/conforming.hpp"
#include "dgcontact/estimator.hpp"
#include "dgcontact/mesh_io.hpp"
#include "dgcontact/solver.hpp"

namespace dgc {

/// The averaging operator chi of Eq. chi: continuous piecewise linear,
/// zero at Gamma_1 nodes. At regular nodes the value is the mean of the
/// element-local values over the corner incidences; hanging nodes inherit
/// the linear interpolant along the coarse neighbor's side.
inline BrokenField conforming_average(const BrokenField& v) {
  const Mesh& mesh = v.mesh();
  int nv = mesh.n_vertices();
  std::vector<double> sum(nv, 0.0);
  std::vector<int> count(nv, 0);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int j = 0; j < 3; ++j) {
      int nu = mesh.triangles()[t].v[j];
      sum[nu] += v.coeff(t, j);
      count[nu] += 1;
    }
  std::vector<double> beta(nv, 0.0);
  std::vector<char> ready(nv, 0);
  std::vector<char> on_gamma1(nv, 0);
  for (int nu : mesh.gamma1_nodes()) on_gamma1[nu] = 1;
  for (int nu = 0; nu < nv; ++nu) {
    if (on_gamma1[nu]) {
      beta[nu] = 0.0;
      ready[nu] = 1;
    } else if (count[nu] > 0 && !mesh.hanging_nodes().count(nu)) {
      beta[nu] = sum[nu] / count[nu];
      ready[nu] = 1;
    }
  }
  // hanging nodes: midpoint of the coarse side, value by linearity; the
  // endpoints may themselves hang one level coarser, so iterate to fixpoint
  struct Hang {
    int node, a = -1, b = -1;
  };
  std::vector<Hang> hangs;
  for (int nu : mesh.hanging_nodes()) {
    Hang h;
    h.node = nu;
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const Edge& ed = mesh.edges()[e];
      if (ed.coarse_tri < 0) continue;
      int other = -1;
      if (ed.a == nu) other = ed.b;
      if (ed.b == nu) other = ed.a;
      if (other < 0) continue;
      const auto& cv = mesh.triangles()[ed.coarse_tri].v;
      if (other != cv[0] && other != cv[1] && other != cv[2]) continue;
      (h.a < 0 ? h.a : h.b) = other;
    }
    if (h.a < 0 || h.b < 0) throw ValidationError("hanging node without coarse side endpoints");
    hangs.push_back(h);
  }
  for (bool progress = true; progress;) {
    progress = false;
    bool open = false;
    for (const Hang& h : hangs) {
      if (ready[h.node]) continue;
      if (ready[h.a] && ready[h.b]) {
        beta[h.node] = 0.5 * (beta[h.a] + beta[h.b]);
        ready[h.node] = 1;
        progress = true;
      } else {
        open = true;
      }
    }
    if (!open) break;
    if (!progress) throw ValidationError("cyclic hanging-node dependency");
  }
  BrokenField chi(mesh);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int j = 0; j < 3; ++j) chi.coeff(t, j) = beta[mesh.triangles()[t].v[j]];
  return chi;
}

/// Empirical constants of Lemma 2.1: quotients of sum_K ||v - chi||^2_{i,K}
/// over sum_{E0} h_e^{1-2i} ||[v]||^2_e for i = 0, 1. Both zero when the
/// jump term vanishes.
inline std::pair<double, double> lemma21_ratio(const BrokenField& v) {
  const Mesh& mesh = v.mesh();
  BrokenField chi = conforming_average(v);
  double lhs0 = 0.0, lhs1 = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    lhs0 += integrate_element(mesh, t, [&](Point x) {
      double d = v.value(t, x) - chi.value(t, x);
      return d * d;
    });
    Vec2 gd = v.gradient(t) - chi.gradient(t);
    lhs1 += dot(gd, gd) * mesh.triangles()[t].area;
  }
  double rhs0 = 0.0, rhs1 = 0.0;
  std::vector<int> e0 = mesh.interior_edges();
  e0.insert(e0.end(), mesh.gamma1_edges().begin(), mesh.gamma1_edges().end());
  for (int e : e0) {
    const Edge& ed = mesh.edges()[e];
    auto tr = jump_average(v, e);
    double j2 = 0.0;
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      j2 += edge_rule()[q].w * ed.length * dot(tr.jump[q], tr.jump[q]);
    rhs0 += ed.length * j2;
    rhs1 += j2 / ed.length;
  }
  if (rhs0 <= 0.0) return {0.0, 0.0};
  return {lhs0 / rhs0, lhs1 / rhs1};
}

/// Interior bubble phi_K = 27 l1 l2 l3 and edge bubbles tau_i = 4 l_j l_k
/// evaluated in barycentric coordinates.
inline double interior_bubble(double l1, double l2, double l3) { return 27.0 * l1 * l2 * l3; }

/// Extreme values of the four quotients of Lemma 4.1 over the P1 space on a
/// given triangle; edge quantities are the worst cases over the three edges.
struct BubbleConstants {
  double c1_min = 0.0, c1_max = 0.0;  // int phi v^2 / ||v||^2
  double c2_min = 0.0, c2_max = 0.0;  // (||phi v|| + h |phi v|_1) / ||v||
  double c3_min = 0.0, c3_max = 0.0;  // int_e tau v^2 / ||v||_e^2
  double c4_min = 0.0, c4_max = 0.0;  // (h^-1/2 ||tau v||_K + h^1/2 |tau v|_1) / ||v||_e

  bool positive_finite() const {
    auto ok = [](double lo, double hi) {
      return lo > 0.0 && std::isfinite(hi) && hi >= lo;
    };
    return ok(c1_min, c1_max) && ok(c2_min, c2_max) && ok(c3_min, c3_max) && ok(c4_min, c4_max);
  }
};

inline BubbleConstants bubble_constants(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  const auto& verts = mesh.vertices();
  double area = tri.area;
  double h = tri.diameter;
  auto gr = mesh.basis_gradients(t);

  Eigen::Matrix3d M;  // P1 mass
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M(i, j) = area / 12.0 * (i == j ? 2.0 : 1.0);

  // quadratic forms by the high-order rule (all integrands degree <= 8)
  Eigen::Matrix3d Mphi = Eigen::Matrix3d::Zero();  // int phi l_i l_j
  Eigen::Matrix3d P = Eigen::Matrix3d::Zero();     // int phi^2 l_i l_j
  Eigen::Matrix3d Q = Eigen::Matrix3d::Zero();     // int grad(phi l_i).grad(phi l_j)
  for (const auto& qp : triangle_rule_high()) {
    double l[3] = {qp.l1, qp.l2, qp.l3};
    double phi = interior_bubble(qp.l1, qp.l2, qp.l3);
    Vec2 gphi = 27.0 * (qp.l2 * qp.l3 * gr[0] + qp.l1 * qp.l3 * gr[1] + qp.l1 * qp.l2 * gr[2]);
    double w = qp.w * area;
    for (int i = 0; i < 3; ++i) {
      Vec2 gi = phi * gr[i] + l[i] * gphi;
      for (int j = 0; j < 3; ++j) {
        Vec2 gj = phi * gr[j] + l[j] * gphi;
        Mphi(i, j) += w * phi * l[i] * l[j];
        P(i, j) += w * phi * phi * l[i] * l[j];
        Q(i, j) += w * dot(gi, gj);
      }
    }
  }

  BubbleConstants out;
  {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> ges(Mphi, M);
    out.c1_min = ges.eigenvalues().minCoeff();
    out.c1_max = ges.eigenvalues().maxCoeff();
  }
  {
    // sphere sweep in the M metric: v = M^{-1/2} s
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
    Eigen::Matrix3d Mih = es.operatorInverseSqrt();
    Eigen::Matrix3d Pt = Mih * P * Mih, Qt = Mih * Q * Mih;
    double lo = 1e300, hi = 0.0;
    const int n = 96;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double th = M_PI * (a + 0.5) / n, ph = 2.0 * M_PI * b / n;
        Eigen::Vector3d s(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                          std::cos(th));
        double r = std::sqrt(s.dot(Pt * s)) + h * std::sqrt(s.dot(Qt * s));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    out.c2_min = lo;
    out.c2_max = hi;
  }

  // edge quantities: local edge k joins vertices (k+1)%3 and (k+2)%3 and
  // carries tau = 4 l_p l_q
  out.c3_min = out.c4_min = 1e300;
  out.c3_max = out.c4_max = 0.0;
  std::vector<double> gx, gw;
  gauss_legendre_01(6, gx, gw);
  for (int k = 0; k < 3; ++k) {
    int p = (k + 1) % 3, q = (k + 2) % 3;
    Point A = verts[tri.v[p]], B = verts[tri.v[q]];
    double len = norm(B - A);
    Eigen::Matrix2d Me;
    Me << len / 3.0, len / 6.0, len / 6.0, len / 3.0;
    Eigen::Matrix2d Mtau = Eigen::Matrix2d::Zero();
    for (std::size_t gi = 0; gi < gx.size(); ++gi) {
      double s = gx[gi];
      double tau = 4.0 * (1.0 - s) * s;
      double b0 = 1.0 - s, b1 = s;
      double ws = gw[gi] * len;
      Mtau(0, 0) += ws * tau * b0 * b0;
      Mtau(0, 1) += ws * tau * b0 * b1;
      Mtau(1, 0) += ws * tau * b1 * b0;
      Mtau(1, 1) += ws * tau * b1 * b1;
    }
    {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> ges(Mtau, Me);
      out.c3_min = std::min(out.c3_min, ges.eigenvalues().minCoeff());
      out.c3_max = std::max(out.c3_max, ges.eigenvalues().maxCoeff());
    }
    // bub4 over the edge-lifted space v = a l_p + b l_q on K
    Eigen::Matrix2d Pk = Eigen::Matrix2d::Zero(), Qk = Eigen::Matrix2d::Zero();
    for (const auto& qp : triangle_rule_high()) {
      double l[3] = {qp.l1, qp.l2, qp.l3};
      double tau = 4.0 * l[p] * l[q];
      Vec2 gtau = 4.0 * (l[q] * gr[p] + l[p] * gr[q]);
      double w = qp.w * area;
      double bp[2] = {l[p], l[q]};
      Vec2 gb[2] = {gr[p], gr[q]};
      for (int i = 0; i < 2; ++i) {
        Vec2 gi = tau * gb[i] + bp[i] * gtau;
        for (int j = 0; j < 2; ++j) {
          Vec2 gj = tau * gb[j] + bp[j] * gtau;
          Pk(i, j) += w * tau * tau * bp[i] * bp[j];
          Qk(i, j) += w * dot(gi, gj);
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Me);
    Eigen::Matrix2d Mih = es.operatorInverseSqrt();
    Eigen::Matrix2d Pt = Mih * Pk * Mih, Qt = Mih * Qk * Mih;
    const int n = 1024;
    for (int a = 0; a < n; ++a) {
      double th = 2.0 * M_PI * a / n;
      Eigen::Vector2d s(std::cos(th), std::sin(th));
      double r = std::sqrt(s.dot(Pt * s)) / std::sqrt(h) + std::sqrt(h) * std::sqrt(s.dot(Qt * s));
      out.c4_min = std::min(out.c4_min, r);
      out.c4_max = std::max(out.c4_max, r);
    }
  }
  return out;
}

/// ||u_h - u||_{1,h} against a closed-form solution, by the module rule.
inline double error_h1(const Mesh& mesh, const BrokenField& u_h,
                       const std::function<double(Point)>& u,
                       const std::function<Vec2(Point)>& grad_u) {
  double sum = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    Vec2 gh = u_h.gradient(t);
    sum += integrate_element(mesh, t, [&](Point x) {
      Vec2 gd = gh - grad_u(x);
      double d = u_h.value(t, x) - u(x);
      return dot(gd, gd) + d * d;
    });
  }
  return std::sqrt(sum);
}

/// sum_{E0} h_e^{-1} ||[u_h]||^2_e, the jump term of the bridge inequality.
inline double jump_term(const BrokenField& u_h) {
  const Mesh& mesh = u_h.mesh();
  std::vector<int> e0 = mesh.interior_edges();
  e0.insert(e0.end(), mesh.gamma1_edges().begin(), mesh.gamma1_edges().end());
  double sum = 0.0;
  for (int e : e0) {
    const Edge& ed = mesh.edges()[e];
    auto tr = jump_average(u_h, e);
    double j2 = 0.0;
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      j2 += edge_rule()[q].w * ed.length * dot(tr.jump[q], tr.jump[q]);
    sum += j2 / ed.length;
  }
  return sum;
}

/// A built-in problem: data plus (when available) the exact solution, or a
/// recipe for a fine-grid reference. `constructed` marks the AFFINE fixture
/// whose pair (u_h, lambda_h) is prescribed rather than solved for: u = x is
/// not the solution of the variational inequality on any bounded polygon,
/// but the pair reproduces every residual of the estimator exactly.
struct Benchmark {
  std::string name;
  std::string description;
  double g = 1.0;
  std::function<double(Point)> f;
  std::function<double(Point)> exact_u;
  std::function<Vec2(Point)> exact_grad;
  std::function<double(Point)> exact_lambda;
  bool constructed = false;
  bool reference = false;  // exact fields come from a fine conforming solve
  std::function<Mesh()> make_mesh;
};

inline std::vector<Benchmark> builtin_benchmarks() {
  std::vector<Benchmark> out;
  {
    Benchmark b;
    b.name = "STICK";
    b.description = "manufactured stick solution on the unit square";
    b.g = 4.0;
    b.f = [](Point p) {
      return (2.0 * M_PI * M_PI + 1.0) * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
    };
    b.exact_u = [](Point p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
    b.exact_grad = [](Point p) {
      return Vec2{M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y),
                  M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y)};
    };
    b.exact_lambda = [](Point p) { return M_PI / 4.0 * std::sin(M_PI * p.x); };
    b.make_mesh = [] { return unit_square_mesh(2); };
    out.push_back(std::move(b));
  }
  {
    Benchmark b;
    b.name = "SLIP";
    b.description = "small friction bound, slip zone; fine-grid reference";
    b.g = 0.1;
    b.f = [](Point p) {
      return (2.0 * M_PI * M_PI + 1.0) * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
    };
    b.reference = true;
    b.make_mesh = [] { return unit_square_mesh(2); };
    out.push_back(std::move(b));
  }
  {
    Benchmark b;
    b.name = "LSHAPE";
    b.description = "L-shaped domain, reentrant corner; property-only";
    b.g = 1.0;
    b.f = [](Point) { return 1.0; };
    b.make_mesh = [] { return lshape_mesh(); };
    out.push_back(std::move(b));
  }
  {
    Benchmark b;
    b.name = "AFFINE";
    b.description = "constructed affine pair on a strip; all residuals vanish";
    b.g = 2.0;
    b.f = [](Point p) { return p.x; };
    b.exact_u = [](Point p) { return p.x; };
    b.exact_grad = [](Point) { return Vec2{1.0, 0.0}; };
    b.exact_lambda = [](Point p) { return std::abs(p.x - 1.0) < 1e-12 ? -0.5 : 0.0; };
    b.constructed = true;
    b.make_mesh = [] { return strip_mesh(2); };
    out.push_back(std::move(b));
  }
  return out;
}

inline Benchmark benchmark_by_name(const std::string& name) {
  for (auto& b : builtin_benchmarks())
    if (b.name == name) return b;
  throw ConfigError("unknown benchmark '" + name + "'");
}

/// The AFFINE pair on a given strip-type mesh: the nodal interpolant of x
/// and the matching Neumann multiplier.
inline void constructed_pair(const Mesh& mesh, const Benchmark& b, BrokenField& u,
                             Multiplier& lambda) {
  u = BrokenField::interpolate(mesh, b.exact_u);
  for (std::size_t pos = 0; pos < mesh.gamma2_edges().size(); ++pos) {
    const Edge& e = mesh.edges()[mesh.gamma2_edges()[pos]];
    Vec2 g = b.exact_grad(mesh.edge_point(mesh.gamma2_edges()[pos], 0.5));
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      lambda.at(static_cast<int>(pos), q) = -dot(g, e.normal) / b.g;
  }
}

/// Fine-grid reference solution: conforming VI solve on the last mesh of a
/// uniform refinement chain starting at `base`.
struct ReferenceSolution {
  std::vector<std::shared_ptr<Mesh>> chain;  // chain[0] = base
  std::unique_ptr<BrokenField> u;            // on chain.back()
  std::unique_ptr<Multiplier> lambda;
};

inline ReferenceSolution make_reference(const Mesh& base, const std::function<double(Point)>& f,
                                        double g, int levels,
                                        const UzawaParams& params = {}) {
  ReferenceSolution ref;
  ref.chain.push_back(std::make_shared<Mesh>(base));
  for (int i = 0; i < levels; ++i)
    ref.chain.push_back(std::make_shared<Mesh>(ref.chain.back()->uniform_refine()));
  ConformingSystem sys(*ref.chain.back(), f, g);
  auto res = sys.solve_vi(params);
  ref.u = std::make_unique<BrokenField>(sys.to_broken(res.nodal));
  ref.lambda = std::make_unique<Multiplier>(*ref.chain.back(), g);
  ref.lambda->values() = res.lambda.values();
  return ref;
}

/// Exact transfer of a broken P1 field along a refinement chain.
inline BrokenField transfer_through(const BrokenField& u,
                                    const std::vector<std::shared_ptr<Mesh>>& chain,
                                    std::size_t from, std::size_t to) {
  BrokenField cur = u;
  for (std::size_t i = from; i < to; ++i) cur = cur.interpolate_to_child(*chain[i + 1]);
  return cur;
}

/// ||u_h - u_ref||_{1,h} evaluated on the reference mesh after exact
/// transfer of u_h through the chain.
inline double error_against_reference(const BrokenField& u_h, const ReferenceSolution& ref,
                                      std::size_t level) {
  BrokenField fine = transfer_through(u_h, ref.chain, level, ref.chain.size() - 1);
  for (int i = 0; i < fine.size(); ++i) fine.data()[i] -= ref.u->data()[i];
  return broken_norms(fine).h1;
}

/// Multiplier gap |lambda - lambda_h|_{*,h} evaluated on the mesh carrying
/// lambda_h; the exact or reference multiplier is sampled at the Gauss
/// points of that mesh.
inline double multiplier_gap(const Multiplier& lambda_h,
                             const std::function<double(Point)>& exact_lambda) {
  const Mesh& mesh = lambda_h.mesh();
  Multiplier diff = Multiplier::sample(mesh, lambda_h.friction_bound(), exact_lambda);
  diff.values() -= lambda_h.values();
  return dual_norm(mesh, diff);
}

/// The bridge inequality, Eq. bridge: returns LHS, RHS and their quotient,
/// with z realized as a conforming solve `fine_levels` uniform refinements
/// below the current mesh.
struct BridgeReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // 0 when LHS = RHS = 0
};

inline BridgeReport bridge_check(const Mesh& mesh, const BrokenField& u_h,
                                 const Multiplier& lambda_h,
                                 const std::function<double(Point)>& f, double g,
                                 double error_u, double lambda_gap, int fine_levels = 4) {
  std::vector<std::shared_ptr<Mesh>> chain;
  chain.push_back(std::make_shared<Mesh>(mesh));
  for (int i = 0; i < fine_levels; ++i)
    chain.push_back(std::make_shared<Mesh>(chain.back()->uniform_refine()));
  const Mesh& fine = *chain.back();
  ConformingSystem sys(fine, f, g);
  Eigen::VectorXd lam_fine(3 * fine.gamma2_edges().size());
  for (std::size_t pos = 0; pos < fine.gamma2_edges().size(); ++pos)
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      lam_fine[3 * pos + q] =
          lambda_h.evaluate(fine.edge_point(fine.gamma2_edges()[pos], edge_rule()[q].s));
  BrokenField z = sys.to_broken(sys.solve_linear(lam_fine));
  BrokenField diff = transfer_through(u_h, chain, 0, chain.size() - 1);
  for (int i = 0; i < diff.size(); ++i) diff.data()[i] -= z.data()[i];

  BridgeReport rep;
  rep.lhs = error_u + lambda_gap;
  rep.rhs = broken_norms(diff).h1 + std::sqrt(jump_term(u_h));
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

/// One level of a uniform-refinement verification study.
struct VerificationRow {
  int level = 0;
  int dofs = 0;
  double h = 0.0;
  double eta_tot = 0.0;
  double error_u = std::numeric_limits<double>::quiet_NaN();
  double lambda_gap = std::numeric_limits<double>::quiet_NaN();
  double effectivity = std::numeric_limits<double>::quiet_NaN();
  double bridge_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct StudyOptions {
  int levels = 4;          // number of solves (base mesh counts as level 0)
  bool with_bridge = false;
  int bridge_fine_levels = 4;
  int reference_extra_levels = 4;  // reference mesh depth beyond the finest level
  LdgConfig ldg;
  UzawaParams uzawa;
};

/// Uniform refinement study of a benchmark: per level the DG solve, the
/// estimator total, the true (or reference) errors, the effectivity index
/// and optionally the bridge ratio.
inline std::vector<VerificationRow> uniform_study(const Benchmark& bench,
                                                  const StudyOptions& opt = {}) {
  std::vector<std::shared_ptr<Mesh>> chain;
  chain.push_back(std::make_shared<Mesh>(bench.make_mesh()));
  for (int i = 1; i < opt.levels; ++i)
    chain.push_back(std::make_shared<Mesh>(chain.back()->uniform_refine()));

  ReferenceSolution ref;
  if (bench.reference) {
    ref.chain = chain;
    for (int i = 0; i < opt.reference_extra_levels; ++i)
      ref.chain.push_back(std::make_shared<Mesh>(ref.chain.back()->uniform_refine()));
    ConformingSystem rsys(*ref.chain.back(), bench.f, bench.g);
    auto rres = rsys.solve_vi(opt.uzawa);
    ref.u = std::make_unique<BrokenField>(rsys.to_broken(rres.nodal));
    ref.lambda = std::make_unique<Multiplier>(*ref.chain.back(), bench.g);
    ref.lambda->values() = rres.lambda.values();
  }

  std::vector<VerificationRow> rows;
  for (int level = 0; level < opt.levels; ++level) {
    const Mesh& mesh = *chain[level];
    VerificationRow row;
    row.level = level;
    row.dofs = 3 * mesh.n_triangles();
    double h = 0.0;
    for (const auto& tri : mesh.triangles()) h = std::max(h, tri.diameter);
    row.h = h;

    BrokenField u_h(mesh);
    Multiplier lambda_h(mesh, bench.g);
    if (bench.constructed) {
      constructed_pair(mesh, bench, u_h, lambda_h);
    } else {
      auto sys = assemble(mesh, opt.ldg, bench.f, bench.g);
      auto sol = uzawa_solve(sys, opt.uzawa);
      u_h = sol.u;
      lambda_h.values() = sol.lambda.values();
    }
    auto est = local_estimates(mesh, u_h, lambda_h, bench.f, bench.g);
    row.eta_tot = est.eta_tot;

    if (bench.exact_u) {
      row.error_u = error_h1(mesh, u_h, bench.exact_u, bench.exact_grad);
      row.lambda_gap = multiplier_gap(lambda_h, bench.exact_lambda);
    } else if (bench.reference) {
      row.error_u = error_against_reference(u_h, ref, level);
      const Multiplier& rl = *ref.lambda;
      row.lambda_gap =
          multiplier_gap(lambda_h, [&rl](Point p) { return rl.evaluate(p); });
    }
    if (!std::isnan(row.error_u)) {
      double total = row.error_u + row.lambda_gap;
      row.effectivity = total > 0.0
                            ? row.eta_tot / total
                            : (row.eta_tot > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    if (opt.with_bridge)
      row.bridge_ratio = bridge_check(mesh, u_h, lambda_h, bench.f, bench.g, row.error_u,
                                      row.lambda_gap, opt.bridge_fine_levels)
                             .ratio;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dgc
