#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tgrasp/annotate.hpp"
#include "tgrasp/render.hpp"

using namespace tgrasp;

namespace {

Scene disc_scene(const Vec2& center, double radius_mm) {
  Scene scene;
  scene.kind = SceneKind::plane;
  ObjectInstance obj;
  obj.id = 0;
  obj.class_id = 0;
  obj.footprint = make_regular_polygon(center, radius_mm, 48);
  obj.base_height_mm = 0.0;
  obj.top_height_mm = 10.0;
  auto [a, b] = diameter_pair(obj.footprint);
  obj.graspable_diameter_mm = (a - b).norm();
  scene.objects.push_back(obj);
  return scene;
}

}  // namespace

TEST_CASE("farthest pair midpoint lands on the disc centre") {
  Scene scene = disc_scene({20.0, -10.0}, 25.0);
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  auto [a, b] = farthest_pair(scene.objects[0], cam);
  const Vec2 mid = (a + b) / 2.0;
  const Vec2 center_px = cam.project({20.0, -10.0, 10.0});
  CHECK((mid - center_px).norm() < 0.5);
  // Projected diameter ~= 2 * radius / ground scale.
  const double scale = cam.ground_scale(center_px, 10.0);
  CHECK((a - b).norm() == doctest::Approx(50.0 / scale).epsilon(0.05));
}

TEST_CASE("gaussian label peaks at the annotated centre and decays as exp") {
  Scene scene = disc_scene({0.0, 0.0}, 30.0);
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  auto [gm, meta] = gaussian_mask_label(scene, cam, 60.0);
  REQUIRE(meta.objects.size() == 1);
  const auto& ann = meta.objects[0];

  // Peak within 1 px of the annotated centre.
  int br = 0, bc = 0;
  for (int r = 0; r < gm.Q.rows; ++r)
    for (int c = 0; c < gm.Q.cols; ++c)
      if (gm.Q.at(r, c) > gm.Q.at(br, bc)) {
        br = r;
        bc = c;
      }
  CHECK(std::abs(bc + 0.5 - ann.gaussian_center.x) <= 1.0);
  CHECK(std::abs(br + 0.5 - ann.gaussian_center.y) <= 1.0);

  // sigma = r_g / 3: at one sigma from the centre, Q = exp(-1/2).
  const double sigma = ann.gaussian_radius / 3.0;
  const int sr = static_cast<int>(ann.gaussian_center.y);
  const int sc = static_cast<int>(ann.gaussian_center.x + sigma);
  const double d2 = (sc + 0.5 - ann.gaussian_center.x) *
                        (sc + 0.5 - ann.gaussian_center.x) +
                    (sr + 0.5 - ann.gaussian_center.y) *
                        (sr + 0.5 - ann.gaussian_center.y);
  CHECK(gm.Q.at(sr, sc) ==
        doctest::Approx(std::exp(-d2 / (2.0 * sigma * sigma))).epsilon(1e-4));
}

TEST_CASE("Q and R vanish outside the object mask") {
  Scene scene = disc_scene({0.0, 0.0}, 20.0);
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  auto [gm, meta] = gaussian_mask_label(scene, cam, 60.0);
  const Polygon mask_px = project_footprint(scene.objects[0], cam);
  int outside_nonzero = 0;
  for (int r = 0; r < gm.Q.rows; ++r)
    for (int c = 0; c < gm.Q.cols; ++c) {
      const bool inside = point_in_polygon(mask_px, {c + 0.5, r + 0.5});
      if (!inside && (gm.Q.at(r, c) != 0.0f || gm.R.at(r, c) != 0.0f))
        ++outside_nonzero;
    }
  CHECK(outside_nonzero == 0);
}

TEST_CASE("R is the clamped normalized grasp radius on the mask") {
  Scene scene = disc_scene({0.0, 0.0}, 25.0);
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  auto [gm, meta] = gaussian_mask_label(scene, cam, 60.0);
  const auto& ann = meta.objects[0];
  const float want =
      static_cast<float>(std::min(ann.gaussian_radius, 60.0) / 60.0);
  const int r = static_cast<int>(ann.gaussian_center.y);
  const int c = static_cast<int>(ann.gaussian_center.x);
  CHECK(gm.R.at(r, c) == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("binary label is the indicator of the mask") {
  Scene scene = disc_scene({10.0, 5.0}, 20.0);
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  GraspMap gm = binary_label(scene, cam, 60.0);
  for (float q : gm.Q.v) CHECK((q == 0.0f || q == 1.0f));
  double area = 0.0;
  for (float q : gm.Q.v) area += q;
  CHECK(area > 0.0);
}

TEST_CASE("overlapping objects resolve Q by pixelwise max") {
  Scene scene = disc_scene({0.0, 0.0}, 25.0);
  ObjectInstance second = scene.objects[0];
  second.id = 1;
  second.footprint = make_regular_polygon({12.0, 0.0}, 25.0, 48);
  second.base_height_mm = 10.0;
  second.top_height_mm = 20.0;
  scene.objects.push_back(second);
  scene.kind = SceneKind::overlapping;
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  auto [gm, meta] = gaussian_mask_label(scene, cam, 60.0);
  CHECK(meta.objects.size() == 2);
  // Each object's annotated centre carries (close to) its own peak value.
  for (const auto& ann : meta.objects) {
    const int r = static_cast<int>(ann.gaussian_center.y);
    const int c = static_cast<int>(ann.gaussian_center.x);
    CHECK(gm.Q.at(r, c) >= 0.9f);
  }
}

TEST_CASE("object projecting outside the image is rejected") {
  Scene scene = disc_scene({500.0, 0.0}, 25.0);
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  CHECK_THROWS_AS(gaussian_mask_label(scene, cam, 60.0), std::runtime_error);
}

TEST_CASE("annotation meta JSON round trip") {
  Scene scene = disc_scene({5.0, 5.0}, 20.0);
  CameraModel cam = make_overhead_camera(400.0, 0.0, 96, 96, 192.0);
  auto [gm, meta] = gaussian_mask_label(scene, cam, 60.0);
  nlohmann::json j = meta;
  AnnotationMeta back = j.get<AnnotationMeta>();
  REQUIRE(back.objects.size() == meta.objects.size());
  CHECK(back.objects[0].gaussian_radius == meta.objects[0].gaussian_radius);
  CHECK(back.objects[0].gaussian_center == meta.objects[0].gaussian_center);
}
