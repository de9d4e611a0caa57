#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dgcontact/field.hpp"
#include "dgcontact/mesh_io.hpp"
#include "dgcontact/quadrature.hpp"

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

}  // namespace

TEST_CASE("triangle rule weights are positive and sum to the reference measure") {
  double sum = 0.0;
  for (const auto& qp : triangle_rule()) {
    CHECK(qp.w > 0.0);
    CHECK(qp.l1 + qp.l2 + qp.l3 == Catch::Approx(1.0).epsilon(1e-14));
    sum += qp.w;
  }
  CHECK(sum == Catch::Approx(1.0).epsilon(1e-14));
  double esum = 0.0;
  for (const auto& qp : edge_rule()) {
    CHECK(qp.w > 0.0);
    esum += qp.w;
  }
  CHECK(esum == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("element rule integrates constants and degree-4 monomials exactly") {
  Mesh m = unit_right_triangle();
  CHECK(integrate_element(m, 0, [](Point) { return 1.0; }) == Catch::Approx(0.5).epsilon(1e-14));
  // int_T x^2 y^2 = 1/180 on the unit right triangle (symbolic value)
  CHECK(integrate_element(m, 0, [](Point p) { return p.x * p.x * p.y * p.y; }) ==
        Catch::Approx(1.0 / 180.0).epsilon(1e-13));
  // degree-4 exactness: x^4 -> 1/30
  CHECK(integrate_element(m, 0, [](Point p) { return std::pow(p.x, 4); }) ==
        Catch::Approx(1.0 / 30.0).epsilon(1e-13));
}

TEST_CASE("edge rule integrates lengths and degree-5 polynomials exactly") {
  Mesh m = unit_right_triangle();
  int hyp = -1;
  for (int e = 0; e < m.n_edges(); ++e)
    if (m.edges()[e].length > 1.2) hyp = e;
  REQUIRE(hyp >= 0);
  CHECK(integrate_edge(m, hyp, [](Point) { return 1.0; }) ==
        Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
  int bottom = -1;
  for (int e = 0; e < m.n_edges(); ++e)
    if (m.edges()[e].cls == EdgeClass::Gamma2) bottom = e;
  REQUIRE(bottom >= 0);
  // int_0^1 x^5 dx = 1/6 along the bottom edge
  CHECK(integrate_edge(m, bottom, [](Point p) { return std::pow(p.x, 5); }) ==
        Catch::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("high-order rule integrates bubble-degree polynomials exactly") {
  Mesh m = unit_right_triangle();
  const auto& tri = m.triangles()[0];
  const auto& verts = m.vertices();
  // int_T l1 l2 l3 dx = |K| / 60 (cubic barycentric moment)
  double v = 0.0;
  for (const auto& qp : triangle_rule_high()) {
    (void)verts;
    (void)tri;
    v += qp.w * qp.l1 * qp.l2 * qp.l3;
  }
  v *= m.triangles()[0].area;
  CHECK(v == Catch::Approx(0.5 / 60.0).epsilon(1e-13));
  // degree-9 moment: l1^9 -> 2 |K| 9! / 11!
  double v9 = 0.0;
  for (const auto& qp : triangle_rule_high()) v9 += qp.w * std::pow(qp.l1, 9);
  v9 *= m.triangles()[0].area;
  CHECK(v9 == Catch::Approx(2.0 * 0.5 / (10.0 * 11.0)).epsilon(1e-12));
}

TEST_CASE("integration is linear in the integrand") {
  Mesh m = unit_right_triangle();
  auto f = [](Point p) { return std::sin(p.x) + p.y; };
  auto g = [](Point p) { return std::cos(3.0 * p.y); };
  double lhs = integrate_element(m, 0, [&](Point p) { return 2.0 * f(p) - 3.0 * g(p); });
  double rhs = 2.0 * integrate_element(m, 0, f) - 3.0 * integrate_element(m, 0, g);
  CHECK(lhs == Catch::Approx(rhs).margin(1e-13));
}
