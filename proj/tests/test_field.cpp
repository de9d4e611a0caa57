#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dgcontact/field.hpp"
#include "dgcontact/mesh_io.hpp"

using namespace dgc;

TEST_CASE("nodal basis property: vertex evaluation returns the coefficient") {
  Mesh m = unit_square_mesh(2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  BrokenField v(m);
  for (double& c : v.data()) c = u(rng);
  for (int t = 0; t < m.n_triangles(); ++t)
    for (int j = 0; j < 3; ++j) {
      Point x = m.vertices()[m.triangles()[t].v[j]];
      CHECK(v.value(t, x) == Catch::Approx(v.coeff(t, j)).margin(1e-13));
    }
}

TEST_CASE("jump of a continuous field vanishes at quadrature points") {
  Mesh m = unit_square_mesh(2);
  auto v = BrokenField::interpolate(m, [](Point p) { return 1.5 * p.x - 0.3 * p.y + 2.0; });
  for (int e : m.interior_edges()) {
    auto tr = jump_average(v, e);
    for (int q = 0; q < kEdgeQuadPoints; ++q) {
      CHECK(norm(tr.jump[q]) == Catch::Approx(0.0).margin(1e-13));
      CHECK(tr.average[q] == Catch::Approx(v.value(m.edges()[e].tri_plus, tr.points[q])).margin(1e-13));
    }
  }
}

TEST_CASE("piecewise constant field has jump n+ and average 1/2") {
  Mesh m = unit_square_mesh(1);
  BrokenField v(m);
  int plus = m.edges()[m.interior_edges()[0]].tri_plus;
  for (int j = 0; j < 3; ++j) v.coeff(plus, j) = 1.0;
  auto tr = jump_average(v, m.interior_edges()[0]);
  const Vec2 n = m.edges()[m.interior_edges()[0]].normal;
  for (int q = 0; q < kEdgeQuadPoints; ++q) {
    CHECK(tr.jump[q].x == Catch::Approx(n.x).margin(1e-14));
    CHECK(tr.jump[q].y == Catch::Approx(n.y).margin(1e-14));
    CHECK(tr.average[q] == Catch::Approx(0.5).margin(1e-14));
  }
}

TEST_CASE("jump magnitude of x vs 2x along the diagonal") {
  // v = x on K+, v = 2x on K-: jump magnitude |x| at the quadrature points.
  Mesh m = unit_square_mesh(1);
  int e = m.interior_edges()[0];
  const Edge& ed = m.edges()[e];
  BrokenField v(m);
  for (int j = 0; j < 3; ++j) {
    v.coeff(ed.tri_plus, j) = m.vertices()[m.triangles()[ed.tri_plus].v[j]].x;
    v.coeff(ed.tri_minus, j) = 2.0 * m.vertices()[m.triangles()[ed.tri_minus].v[j]].x;
  }
  auto tr = jump_average(v, e);
  for (int q = 0; q < kEdgeQuadPoints; ++q)
    CHECK(norm(tr.jump[q]) == Catch::Approx(std::abs(tr.points[q].x)).margin(1e-13));
}

TEST_CASE("hanging-node trace uses the coarse neighbor's linear extension") {
  Mesh coarse = unit_square_mesh(1);
  Mesh m = coarse.refine({0});
  auto v = BrokenField::interpolate(m, [](Point p) { return 3.0 * p.x + p.y - 0.7; });
  for (int e = 0; e < m.n_edges(); ++e) {
    if (m.edges()[e].coarse_tri < 0) continue;
    auto tr = jump_average(v, e);
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      CHECK(norm(tr.jump[q]) == Catch::Approx(0.0).margin(1e-13));
  }
}

TEST_CASE("broken norms satisfy the Pythagorean identity") {
  Mesh m = unit_square_mesh(3);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BrokenField v(m);
  for (double& c : v.data()) c = u(rng);
  auto n = broken_norms(v);
  CHECK(n.h1 * n.h1 == Catch::Approx(n.l2 * n.l2 + n.h1_semi * n.h1_semi).epsilon(1e-14));
  CHECK(n.l2 >= 0.0);
  CHECK(n.h1_semi >= 0.0);
}

TEST_CASE("broken norms of reference fields") {
  Mesh m = unit_square_mesh(2);
  BrokenField zero(m);
  auto nz = broken_norms(zero);
  CHECK(nz.l2 == 0.0);
  CHECK(nz.h1_semi == 0.0);
  CHECK(nz.h1 == 0.0);

  auto one = BrokenField::interpolate(m, [](Point) { return 1.0; });
  auto n1 = broken_norms(one);
  CHECK(n1.l2 == Catch::Approx(1.0).epsilon(1e-13));
  CHECK(n1.h1_semi == Catch::Approx(0.0).margin(1e-13));
  CHECK(n1.h1 == Catch::Approx(1.0).epsilon(1e-13));

  auto vx = BrokenField::interpolate(m, [](Point p) { return p.x; });
  auto nx = broken_norms(vx);
  CHECK(nx.l2 == Catch::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(nx.h1_semi == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("re-interpolation onto children reproduces the field pointwise") {
  Mesh m = unit_square_mesh(2);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BrokenField v(m);
  for (double& c : v.data()) c = u(rng);
  Mesh f = m.refine({0, 3, 5});
  BrokenField vf = v.interpolate_to_child(f);
  std::uniform_real_distribution<double> bar(0.0, 1.0);
  for (int t = 0; t < f.n_triangles(); ++t) {
    double l1 = bar(rng), l2 = bar(rng) * (1.0 - l1);
    const auto& tv = f.triangles()[t].v;
    Point x = l1 * f.vertices()[tv[0]] + l2 * f.vertices()[tv[1]] +
              (1.0 - l1 - l2) * f.vertices()[tv[2]];
    CHECK(vf.value(t, x) == Catch::Approx(v.value(f.triangles()[t].parent, x)).margin(1e-13));
  }
  // difference of a field with itself has zero norms
  BrokenField d(f);
  for (int i = 0; i < d.size(); ++i) d.data()[i] = vf.data()[i] - vf.data()[i];
  auto nd = broken_norms(d);
  CHECK(nd.h1 == 0.0);
}
