#pragma once

#include <cmath>

namespace dgc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::sqrt(dot(v, v)); }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

using Point = Vec2;

/// Twice the signed area of triangle (a, b, c); positive for CCW orientation.
inline double signed_area2(const Point& a, const Point& b, const Point& c) {
  return cross(b - a, c - a);
}

inline Point midpoint(const Point& a, const Point& b) {
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

}  // namespace dgc
