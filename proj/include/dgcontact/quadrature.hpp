#pragma once

#include <array>
#include <vector>

#include "dgcontact/geometry.hpp"

namespace dgc {

/// Quadrature point on the reference triangle in barycentric coordinates.
struct TriQuadPoint {
  double l1, l2, l3;  // barycentric coordinates, l1 + l2 + l3 = 1
  double w;           // weight, relative to the element area
};

/// 6-point symmetric rule, exact for polynomials of total degree <= 4.
/// Weights sum to 1; multiply by the element area when integrating.
inline const std::array<TriQuadPoint, 6>& triangle_rule() {
  static const std::array<TriQuadPoint, 6> rule = [] {
    const double a1 = 0.445948490915965;
    const double w1 = 0.223381589678011;
    const double a2 = 0.091576213509771;
    const double w2 = 0.109951743655322;
    std::array<TriQuadPoint, 6> r{};
    r[0] = {1.0 - 2.0 * a1, a1, a1, w1};
    r[1] = {a1, 1.0 - 2.0 * a1, a1, w1};
    r[2] = {a1, a1, 1.0 - 2.0 * a1, w1};
    r[3] = {1.0 - 2.0 * a2, a2, a2, w2};
    r[4] = {a2, a2, 1.0 - 2.0 * a2, w2};
    r[5] = {a2, 1.0 - 2.0 * a2, a2, w2};
    return r;
  }();
  return rule;
}

/// Gauss point on the reference edge [0, 1].
struct EdgeQuadPoint {
  double s;  // parameter in [0, 1]
  double w;  // weight, relative to the edge length
};

/// 3-point Gauss-Legendre rule on [0, 1], exact for degree <= 5.
inline const std::array<EdgeQuadPoint, 3>& edge_rule() {
  static const std::array<EdgeQuadPoint, 3> rule = [] {
    const double c = 0.5 * std::sqrt(0.6);
    std::array<EdgeQuadPoint, 3> r{};
    r[0] = {0.5 - c, 5.0 / 18.0};
    r[1] = {0.5, 8.0 / 18.0};
    r[2] = {0.5 + c, 5.0 / 18.0};
    return r;
  }();
  return rule;
}

inline constexpr int kEdgeQuadPoints = 3;

/// Nodes/weights of n-point Gauss-Legendre on [0, 1] (Newton on Legendre roots).
inline void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// High-order rule on the reference triangle via a collapsed tensor product;
/// exact for polynomial degree <= 9 with n = 10 points per direction. Used for
/// bubble-function integrals that exceed the degree-4 base rule.
inline const std::vector<TriQuadPoint>& triangle_rule_high() {
  static const std::vector<TriQuadPoint> rule = [] {
    const int n = 10;
    std::vector<double> x, w;
    gauss_legendre_01(n, x, w);
    std::vector<TriQuadPoint> r;
    r.reserve(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // Duffy map: (u, v) -> (u, v (1 - u)), Jacobian (1 - u).
        double u = x[i], v = x[j];
        double l2 = u;
        double l3 = v * (1.0 - u);
        double l1 = 1.0 - l2 - l3;
        // factor 2: weights are relative to area = |J_affine| / 2
        r.push_back({l1, l2, l3, 2.0 * w[i] * w[j] * (1.0 - u)});
      }
    return r;
  }();
  return rule;
}

}  // namespace dgc
