#include "tgrasp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace tgrasp {

double polygon_area(const Polygon& poly) {
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += a.cross(b);
  }
  return 0.5 * std::abs(s);
}

Vec2 polygon_centroid(const Polygon& poly) {
  double s = 0.0;
  Vec2 c;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double w = a.cross(b);
    s += w;
    c += (a + b) * w;
  }
  if (std::abs(s) < 1e-12) {
    // Degenerate: fall back to vertex mean.
    Vec2 m;
    for (const auto& v : poly) m += v;
    return m / static_cast<double>(n);
  }
  return c / (3.0 * s);
}

bool point_in_polygon(const Polygon& poly, const Vec2& p) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

namespace {

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                        const Vec2& q2) {
  auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = (b - a).cross(c - a);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
  };
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  auto on_seg = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::min(a.x, b.x) - 1e-12 <= c.x && c.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= c.y && c.y <= std::max(a.y, b.y) + 1e-12;
  };
  if (o1 == 0 && on_seg(p1, p2, q1)) return true;
  if (o2 == 0 && on_seg(p1, p2, q2)) return true;
  if (o3 == 0 && on_seg(q1, q2, p1)) return true;
  if (o4 == 0 && on_seg(q1, q2, p2)) return true;
  return false;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double denom = ab.squared_norm();
  double t = denom > 0.0 ? (p - a).dot(ab) / denom : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

}  // namespace

bool polygon_is_simple(const Polygon& poly) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // Skip adjacent edges (they share a vertex).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j],
                             poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  for (const auto& v : a)
    if (point_in_polygon(b, v)) return true;
  for (const auto& v : b)
    if (point_in_polygon(a, v)) return true;
  const size_t na = a.size(), nb = b.size();
  for (size_t i = 0; i < na; ++i)
    for (size_t j = 0; j < nb; ++j)
      if (segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]))
        return true;
  return false;
}

double distance_to_boundary(const Polygon& poly, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 &&
           (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower &&
           (hull[k - 1] - hull[k - 2]).cross(pts[i] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::pair<Vec2, Vec2> diameter_pair(const std::vector<Vec2>& pts) {
  if (pts.size() < 2)
    throw std::invalid_argument("diameter_pair: need at least 2 points");
  Polygon h = convex_hull(pts);
  if (h.size() == 1) throw std::invalid_argument("diameter_pair: degenerate set");
  if (h.size() == 2) return {h[0], h[1]};
  const size_t n = h.size();
  size_t j = 1;
  double best = -1.0;
  std::pair<Vec2, Vec2> out{h[0], h[1]};
  for (size_t i = 0; i < n; ++i) {
    const Vec2 edge = h[(i + 1) % n] - h[i];
    while (std::abs(edge.cross(h[(j + 1) % n] - h[i])) >
           std::abs(edge.cross(h[j] - h[i])))
      j = (j + 1) % n;
    for (const Vec2& p : {h[i], h[(i + 1) % n]}) {
      const double d = (h[j] - p).squared_norm();
      if (d > best) {
        best = d;
        out = {p, h[j]};
      }
    }
  }
  return out;
}

Polygon make_regular_polygon(const Vec2& center, double radius, int n,
                             double phase) {
  Polygon p;
  p.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2.0 * M_PI * i / n;
    p.push_back({center.x + radius * std::cos(a),
                 center.y + radius * std::sin(a)});
  }
  return p;
}

Polygon make_ellipse_polygon(const Vec2& center, double rx, double ry, int n) {
  Polygon p;
  p.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    p.push_back({center.x + rx * std::cos(a), center.y + ry * std::sin(a)});
  }
  return p;
}

Polygon make_star_polygon(const Vec2& center, double outer_radius,
                          double inner_radius, int points, double phase) {
  Polygon p;
  p.reserve(2 * points);
  for (int i = 0; i < 2 * points; ++i) {
    const double r = (i % 2 == 0) ? outer_radius : inner_radius;
    const double a = phase + M_PI * i / points;
    p.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return p;
}

Polygon translate(const Polygon& poly, const Vec2& d) {
  Polygon out = poly;
  for (auto& v : out) v += d;
  return out;
}

}  // namespace tgrasp
