#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tgrasp/geometry.hpp"
#include "tgrasp/tactile.hpp"

using namespace tgrasp;

namespace {

// O(n^2) farthest-pair reference.
std::pair<Vec2, Vec2> brute_diameter(const std::vector<Vec2>& pts) {
  double best = -1.0;
  std::pair<Vec2, Vec2> out{pts[0], pts[0]};
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).squared_norm();
      if (d > best) {
        best = d;
        out = {pts[i], pts[j]};
      }
    }
  return out;
}

// O(n^3) minimum-enclosing-circle reference: try every circle defined by one
// point (degenerate), two points (diametral) or three points (circumcircle),
// keep the smallest that contains everything.
Circle brute_mec(const std::vector<Vec2>& pts) {
  auto contains_all = [&](const Circle& c) {
    for (const auto& p : pts)
      if ((p - c.center).norm() > c.radius + 1e-9) return false;
    return true;
  };
  Circle best{{0, 0}, 1e300};
  for (size_t i = 0; i < pts.size(); ++i) {
    if (contains_all({pts[i], 0.0})) return {pts[i], 0.0};
    for (size_t j = i + 1; j < pts.size(); ++j) {
      Circle two{(pts[i] + pts[j]) / 2.0, (pts[i] - pts[j]).norm() / 2.0};
      if (two.radius < best.radius && contains_all(two)) best = two;
      for (size_t k = j + 1; k < pts.size(); ++k) {
        const Vec2 a = pts[i], b = pts[j], c = pts[k];
        const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) +
                                c.x * (a.y - b.y));
        if (std::abs(d) < 1e-12) continue;
        const double ux = (a.squared_norm() * (b.y - c.y) +
                           b.squared_norm() * (c.y - a.y) +
                           c.squared_norm() * (a.y - b.y)) / d;
        const double uy = (a.squared_norm() * (c.x - b.x) +
                           b.squared_norm() * (a.x - c.x) +
                           c.squared_norm() * (b.x - a.x)) / d;
        Circle three{{ux, uy}, (Vec2{ux, uy} - a).norm()};
        if (three.radius < best.radius && contains_all(three)) best = three;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("polygon area and centroid on a unit square") {
  Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_area(sq) == doctest::Approx(1.0));
  Vec2 c = polygon_centroid(sq);
  CHECK(c.x == doctest::Approx(0.5));
  CHECK(c.y == doctest::Approx(0.5));
}

TEST_CASE("point_in_polygon on a triangle") {
  Polygon tri{{0, 0}, {4, 0}, {0, 4}};
  CHECK(point_in_polygon(tri, {1, 1}));
  CHECK_FALSE(point_in_polygon(tri, {3, 3}));
  CHECK_FALSE(point_in_polygon(tri, {-1, 0}));
}

TEST_CASE("convex hull of a square plus interior points") {
  std::vector<Vec2> pts{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}, {0.5, 0.5}};
  Polygon hull = convex_hull(pts);
  CHECK(hull.size() == 4);
  CHECK(polygon_area(hull) == doctest::Approx(4.0));
}

TEST_CASE("diameter_pair matches the quadratic reference") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> pts(3 + rng() % 40);
    for (auto& p : pts) p = {u(rng), u(rng)};
    auto [a, b] = diameter_pair(pts);
    auto [ra, rb] = brute_diameter(pts);
    CHECK((a - b).norm() == doctest::Approx((ra - rb).norm()).epsilon(1e-12));
  }
}

TEST_CASE("min_enclosing_circle matches the cubic reference over 1000 sets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Vec2> pts(1 + rng() % 50);
    for (auto& p : pts) p = {u(rng), u(rng)};
    Circle fast = min_enclosing_circle(pts);
    Circle slow = brute_mec(pts);
    CHECK(std::abs(fast.radius - slow.radius) < 1e-9);
    CHECK((fast.center - slow.center).norm() < 1e-9);
  }
}

TEST_CASE("min_enclosing_circle throws on empty input") {
  CHECK_THROWS(min_enclosing_circle({}));
}

TEST_CASE("regular polygon approximates its circle") {
  Polygon p = make_regular_polygon({3, -2}, 10.0, 64);
  CHECK(polygon_area(p) ==
        doctest::Approx(M_PI * 100.0).epsilon(0.01));
  Vec2 c = polygon_centroid(p);
  CHECK(c.x == doctest::Approx(3.0));
  CHECK(c.y == doctest::Approx(-2.0));
}

TEST_CASE("star polygon is simple and contains its centre") {
  Polygon s = make_star_polygon({0, 0}, 20.0, 8.0, 7);
  CHECK(polygon_is_simple(s));
  CHECK(point_in_polygon(s, {0, 0}));
  CHECK(polygon_area(s) > 0.0);
}

TEST_CASE("translate shifts every vertex") {
  Polygon tri{{0, 0}, {1, 0}, {0, 1}};
  Polygon moved = translate(tri, {5, -3});
  for (size_t i = 0; i < tri.size(); ++i) {
    CHECK(moved[i].x == tri[i].x + 5);
    CHECK(moved[i].y == tri[i].y - 3);
  }
}

TEST_CASE("overlap detection distinguishes disjoint and intersecting") {
  Polygon a{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(polygons_overlap(a, translate(a, {1, 1})));
  CHECK_FALSE(polygons_overlap(a, translate(a, {5, 0})));
}

TEST_CASE("distance_to_boundary of a square") {
  Polygon sq{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  CHECK(distance_to_boundary(sq, {2, 2}) == doctest::Approx(2.0));
  CHECK(distance_to_boundary(sq, {2, 1}) == doctest::Approx(1.0));
}
