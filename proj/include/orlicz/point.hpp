#pragma once

#include <algorithm>
#include <cmath>

namespace orlicz {

// Spatial dimension of every mesh and Φ-family in this library. Formulas that
// carry n (t^{n-1}, s^n, ...) use this constant rather than a literal 2.
inline constexpr int kDim = 2;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Euclidean distance from p to the closed segment [a, b].
inline double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + s * ab);
}

// Axis-aligned closed rectangle [x0, x1] × [y0, y1].
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(Point p, double slack = 0.0) const {
    return p.x >= x0 - slack && p.x <= x1 + slack && p.y >= y0 - slack && p.y <= y1 + slack;
  }
  bool contains_ball(Point c, double r) const {
    return c.x - r >= x0 && c.x + r <= x1 && c.y - r >= y0 && c.y + r <= y1;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double diagonal() const { return std::hypot(width(), height()); }
  friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace orlicz
