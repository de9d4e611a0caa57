#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "dense_oracle.hpp"
#include "dgcontact/estimator.hpp"
#include "dgcontact/mesh_io.hpp"
#include "dgcontact/solver.hpp"

using namespace dgc;

namespace {

Mesh unit_right_triangle() {
  std::vector<Point> verts = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}};
  Mesh::TagMap tags;
  tags[{0, 1}] = BoundaryTag::G2;
  tags[{1, 2}] = BoundaryTag::G1;
  tags[{0, 2}] = BoundaryTag::G1;
  return Mesh::build(verts, tris, tags);
}

/// u_h = x and lambda_h = -du/dn / g on the strip: every residual entering
/// eta_K and eta_dK vanishes identically. Members hold pointers into
/// `mesh`, so the fixture is built in place and never moved.
struct AffinePair {
  Mesh mesh;
  double g;
  BrokenField u;
  Multiplier lambda;

  explicit AffinePair(int n)
      : mesh(strip_mesh(n)),
        g(2.0),
        u(BrokenField::interpolate(mesh, [](Point p) { return p.x; })),
        lambda(mesh, g) {
    for (std::size_t pos = 0; pos < mesh.gamma2_edges().size(); ++pos) {
      const Edge& e = mesh.edges()[mesh.gamma2_edges()[pos]];
      for (int q = 0; q < kEdgeQuadPoints; ++q)
        lambda.at(static_cast<int>(pos), q) = -e.normal.x / g;
    }
  }
};

}  // namespace

TEST_CASE("interior residual is f - u_h for linear elements") {
  Mesh m = unit_square_mesh(2);
  auto zero = BrokenField::interpolate(m, [](Point) { return 0.0; });
  auto f0 = [](Point) { return 0.0; };
  CHECK(interior_residual(zero, f0, 0)({0.3, 0.2}) == 0.0);
  auto one = BrokenField::interpolate(m, [](Point) { return 1.0; });
  auto f1 = [](Point) { return 1.0; };
  for (int t = 0; t < m.n_triangles(); ++t)
    CHECK(interior_residual(one, f1, t)(m.centroid(t)) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("edge residual") {
  Mesh m = unit_square_mesh(1);
  SECTION("vanishes across edges of a globally affine field") {
    auto u = BrokenField::interpolate(m, [](Point p) { return 2.0 * p.x - p.y + 1.0; });
    for (int e : m.interior_edges()) {
      auto r = edge_residual(m, u, nullptr, 1.0, e);
      for (double v : r) CHECK(v == Catch::Approx(0.0).margin(1e-14));
    }
  }
  SECTION("rejects Gamma_1 edges") {
    auto u = BrokenField::interpolate(m, [](Point) { return 0.0; });
    CHECK_THROWS_AS(edge_residual(m, u, nullptr, 1.0, m.gamma1_edges()[0]), ValidationError);
  }
  SECTION("hand-computed jump on the diagonal") {
    // u_h = x on triangle 0, u_h = y on triangle 1: [grad u_h] = (1,-1).n+
    BrokenField u(m);
    for (int j = 0; j < 3; ++j) {
      u.coeff(0, j) = m.vertices()[m.triangles()[0].v[j]].x;
      u.coeff(1, j) = m.vertices()[m.triangles()[1].v[j]].y;
    }
    int e = m.interior_edges()[0];
    Vec2 n = m.edges()[e].normal;
    double expect = (m.edges()[e].tri_plus == 0 ? 1.0 : -1.0) * (n.x - n.y);
    auto r = edge_residual(m, u, nullptr, 1.0, e);
    for (double v : r) CHECK(v == Catch::Approx(expect).epsilon(1e-14));
  }
  SECTION("exact Neumann match on Gamma_2") {
    AffinePair ap(2);
    for (int e : ap.mesh.gamma2_edges()) {
      auto r = edge_residual(ap.mesh, ap.u, &ap.lambda, ap.g, e);
      for (double v : r) CHECK(v == Catch::Approx(0.0).margin(1e-14));
    }
  }
}

TEST_CASE("data oscillation") {
  SECTION("constant f oscillates not at all") {
    Mesh m = unit_square_mesh(2);
    for (double o : data_oscillation(m, [](Point) { return 3.7; }))
      CHECK(o == Catch::Approx(0.0).margin(1e-14));
  }
  SECTION("f = x on the unit right triangle, symbolic value") {
    // f^i = (1/4, 1/2, 1/4), f - fbar = (3x-1)/4, ||f - fbar|| = 1/8,
    // h_K = sqrt(2): osc = sqrt(2)/8.
    Mesh m = unit_right_triangle();
    auto osc = data_oscillation(m, [](Point p) { return p.x; });
    CHECK(osc[0] == Catch::Approx(std::sqrt(2.0) / 8.0).epsilon(1e-13));
  }
  SECTION("smooth f oscillates at second order") {
    auto f = [](Point p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
    double prev = -1.0;
    for (int n : {4, 8, 16}) {
      Mesh m = unit_square_mesh(n);
      double worst = 0.0;
      for (double o : data_oscillation(m, f)) worst = std::max(worst, o);
      if (prev > 0.0) CHECK(worst < 0.3 * prev);
      prev = worst;
    }
  }
}

TEST_CASE("estimators vanish on the exact affine pair") {
  AffinePair ap(2);
  auto est = local_estimates(ap.mesh, ap.u, ap.lambda, [](Point p) { return p.x; }, ap.g);
  for (int t = 0; t < ap.mesh.n_triangles(); ++t) {
    CHECK(est.eta_K[t] == Catch::Approx(0.0).margin(1e-13));
    CHECK(est.eta_dK[t] == Catch::Approx(0.0).margin(1e-13));
  }
  CHECK(est.eta_tot == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("conforming fields have zero jump estimator") {
  Mesh m = unit_square_mesh(3);
  auto u = BrokenField::interpolate(m, [](Point p) {
    return std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
  });
  Multiplier lam(m, 1.0);
  auto est = local_estimates(m, u, lam, [](Point) { return 0.0; }, 1.0);
  for (double v : est.eta_dK) CHECK(v == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("element-wise and edge-loop accumulations agree") {
  Mesh m = unit_square_mesh(2).refine({0, 3});
  auto u = BrokenField::interpolate(m, [](Point p) { return p.x * p.x - 0.3 * p.y; });
  Multiplier lam = Multiplier::sample(m, 1.5, [](Point p) { return 0.4 * std::sin(p.x); });
  auto f = [](Point p) { return std::cos(2.0 * p.x + p.y); };
  auto est = local_estimates(m, u, lam, f, 1.5);

  // independent accumulation: volume terms per element, then one pass over
  // the edge list distributing each edge contribution to its neighbors
  std::vector<double> acc(m.n_triangles(), 0.0);
  for (int t = 0; t < m.n_triangles(); ++t) {
    auto rk = interior_residual(u, f, t);
    double h = m.triangles()[t].diameter;
    acc[t] += h * h * integrate_element(m, t, [&](Point x) { return rk(x) * rk(x); });
  }
  for (int e = 0; e < m.n_edges(); ++e) {
    const Edge& ed = m.edges()[e];
    if (ed.cls == EdgeClass::Gamma1) continue;
    auto r = edge_residual(m, u, &lam, 1.5, e);
    double r2 = 0.0;
    for (int q = 0; q < kEdgeQuadPoints; ++q) r2 += edge_rule()[q].w * ed.length * r[q] * r[q];
    if (ed.cls == EdgeClass::Interior) {
      acc[ed.tri_plus] += 0.5 * ed.length * r2;
      acc[ed.tri_minus] += 0.5 * ed.length * r2;
    } else {
      acc[ed.tri_plus] += ed.length * r2;
    }
  }
  double sum_a = 0.0, sum_b = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    sum_a += est.eta_K[t] * est.eta_K[t];
    sum_b += acc[t];
    CHECK(acc[t] == Catch::Approx(est.eta_K[t] * est.eta_K[t]).margin(1e-12));
  }
  CHECK(sum_a == Catch::Approx(sum_b).epsilon(1e-12));

  double tot2 = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) tot2 += est.indicator(t);
  CHECK(est.eta_tot == Catch::Approx(std::sqrt(tot2)).epsilon(1e-12));
}

TEST_CASE("dual norm basics") {
  Mesh m = unit_square_mesh(2);
  Multiplier zero(m, 2.0);
  CHECK(dual_norm(m, zero) == 0.0);

  Multiplier mu = Multiplier::sample(m, 2.0, [](Point p) { return 0.3 + 0.5 * p.x; });
  Multiplier mu2 = mu;
  mu2.values() *= 2.0;
  CHECK(dual_norm(m, mu2) == Catch::Approx(2.0 * dual_norm(m, mu)).epsilon(1e-12));

  std::vector<int> omega(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) omega[t] = t;
  CHECK_THROWS_AS(dual_norm(m, mu, {m.interior_edges()[0]}, omega), ValidationError);
}

TEST_CASE("dual norm matches the dense Rayleigh oracle") {
  // sup of int g mu v over the ||.||_{1,h} unit sphere equals the largest
  // eigenvalue of b b^T v = theta A v, computed densely and independently.
  for (Mesh m : {unit_square_mesh(1), unit_square_mesh(2)}) {
    double g = 1.7;
    Multiplier mu = Multiplier::sample(m, g, [](Point p) { return 1.0 - 0.8 * p.x * p.x; });

    int n = 3 * m.n_triangles();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < m.n_triangles(); ++t)
      for (int i = 0; i < 3; ++i) {
        oracle::Affine bi = oracle::basis(m, t, i);
        for (int j = 0; j < 3; ++j) {
          oracle::Affine bj = oracle::basis(m, t, j);
          A(3 * t + i, 3 * t + j) = oracle::integrate_tri(m, t, [&](Point p) {
            return bi.grad().x * bj.grad().x + bi.grad().y * bj.grad().y + bi(p) * bj(p);
          });
        }
        for (int e : m.gamma2_edges()) {
          const Edge& ed = m.edges()[e];
          if (ed.tri_plus != t) continue;
          // Simpson is exact: g mu bi is degree 3 along the edge
          Point pa = m.vertices()[ed.a], pb = m.vertices()[ed.b];
          b[3 * t + i] += oracle::integrate_seg(pa, pb, [&](Point p) {
            return g * (1.0 - 0.8 * p.x * p.x) * bi(p);
          });
        }
      }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(b * b.transpose(), A);
    double oracle_norm = std::sqrt(ges.eigenvalues().maxCoeff());
    CHECK(dual_norm(m, mu) == Catch::Approx(oracle_norm).epsilon(1e-8));
  }
}

TEST_CASE("edge-localized dual norm is dominated by the global one") {
  Mesh m = unit_square_mesh(3);
  Multiplier mu = Multiplier::sample(m, 1.0, [](Point p) { return std::sin(2.0 * p.x); });
  double global = dual_norm(m, mu);
  for (int e : m.gamma2_edges()) CHECK(dual_norm_edge(m, mu, e) <= global + 1e-12);
}

TEST_CASE("estimator total decays at first order on the stick benchmark") {
  auto f = [](Point p) {
    return (2.0 * M_PI * M_PI + 1.0) * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
  };
  double prev = -1.0;
  std::vector<double> totals;
  for (int n : {2, 4, 8}) {
    Mesh m = unit_square_mesh(n);
    auto sys = assemble(m, {}, f, 4.0);
    auto sol = uzawa_solve(sys);
    auto est = local_estimates(m, sol.u, sol.lambda, f, 4.0);
    if (prev > 0.0) CHECK(est.eta_tot < prev);
    totals.push_back(est.eta_tot);
    prev = est.eta_tot;
  }
  double ratio = totals[2] / totals[1];
  CHECK(ratio > 0.4);
  CHECK(ratio < 0.65);
}
