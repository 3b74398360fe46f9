#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace tgrasp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Simple polygon, vertices counter-clockwise, world millimetres.
using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly);
Vec2 polygon_centroid(const Polygon& poly);
bool point_in_polygon(const Polygon& poly, const Vec2& p);
bool polygon_is_simple(const Polygon& poly);
bool polygons_overlap(const Polygon& a, const Polygon& b);

/// Distance from p to the polygon boundary (edges), not signed.
double distance_to_boundary(const Polygon& poly, const Vec2& p);

Polygon convex_hull(std::vector<Vec2> pts);

/// Diameter pair of a point set via convex hull + rotating calipers.
/// Requires at least two points.
std::pair<Vec2, Vec2> diameter_pair(const std::vector<Vec2>& pts);

/// Regular n-gon approximation of a circle.
Polygon make_regular_polygon(const Vec2& center, double radius, int n,
                             double phase = 0.0);

/// Axis-scaled regular polygon (ellipse approximation).
Polygon make_ellipse_polygon(const Vec2& center, double rx, double ry, int n);

Polygon make_star_polygon(const Vec2& center, double outer_radius,
                          double inner_radius, int points,
                          double phase = 0.0);

Polygon translate(const Polygon& poly, const Vec2& d);

}  // namespace tgrasp
