#include "tgrasp/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tgrasp {

std::pair<Vec2, Vec2> farthest_pair(const Polygon& footprint,
                                    const CameraModel& cam,
                                    double plane_height) {
  if (footprint.size() < 2)
    throw std::invalid_argument("farthest_pair: polygon needs >= 2 vertices");
  if (footprint.size() >= 3 && polygon_area(footprint) <= 1e-12)
    throw std::invalid_argument("farthest_pair: degenerate polygon");
  auto [a, b] = diameter_pair(footprint);
  return {cam.project({a.x, a.y, plane_height}),
          cam.project({b.x, b.y, plane_height})};
}

std::pair<Vec2, Vec2> farthest_pair(const ObjectInstance& obj,
                                    const CameraModel& cam) {
  return farthest_pair(obj.footprint, cam, obj.top_height_mm);
}

namespace {

struct LabelContext {
  Polygon poly;      // projected mask, px
  Vec2 center;       // Gaussian centre, px
  double r_g;        // Gaussian radius, px
  double r_value;    // normalized R
  double min_u, max_u, min_v, max_v;
};

std::vector<LabelContext> build_contexts(const Scene& scene,
                                         const CameraModel& cam,
                                         double r_max_px,
                                         AnnotationMeta* meta) {
  std::vector<LabelContext> ctxs;
  for (const auto& obj : scene.objects) {
    LabelContext ctx;
    ctx.poly = project_footprint(obj, cam);
    ctx.min_u = ctx.min_v = 1e18;
    ctx.max_u = ctx.max_v = -1e18;
    for (const auto& v : ctx.poly) {
      if (v.x < 0.0 || v.x > cam.cols || v.y < 0.0 || v.y > cam.rows)
        throw std::runtime_error("annotation clipped");
      ctx.min_u = std::min(ctx.min_u, v.x);
      ctx.max_u = std::max(ctx.max_u, v.x);
      ctx.min_v = std::min(ctx.min_v, v.y);
      ctx.max_v = std::max(ctx.max_v, v.y);
    }
    auto [a, b] = farthest_pair(obj, cam);
    ctx.center = (a + b) * 0.5;
    ctx.r_g = 0.5 * (a - b).norm();
    if (ctx.r_g <= 0.0)
      throw std::runtime_error("annotation: zero gaussian radius");
    ctx.r_value = std::min(ctx.r_g, r_max_px) / r_max_px;
    if (meta) {
      ObjectAnnotation ann;
      ann.object_id = obj.id;
      ann.gaussian_center = ctx.center;
      ann.gaussian_radius = ctx.r_g;
      ann.farthest_a = a;
      ann.farthest_b = b;
      meta->objects.push_back(ann);
    }
    ctxs.push_back(std::move(ctx));
  }
  return ctxs;
}

GraspMap rasterize(const std::vector<LabelContext>& ctxs, int rows, int cols,
                   bool gaussian) {
  GraspMap gm;
  gm.Q = Raster(rows, cols, 0.0f);
  gm.R = Raster(rows, cols, 0.0f);
  for (const auto& ctx : ctxs) {
    const double sigma = ctx.r_g / 3.0;
    const int r0 = std::max(0, static_cast<int>(std::floor(ctx.min_v)));
    const int r1 = std::min(rows - 1, static_cast<int>(std::ceil(ctx.max_v)));
    const int c0 = std::max(0, static_cast<int>(std::floor(ctx.min_u)));
    const int c1 = std::min(cols - 1, static_cast<int>(std::ceil(ctx.max_u)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const Vec2 s(c + 0.5, r + 0.5);
        if (!point_in_polygon(ctx.poly, s)) continue;
        float q = 1.0f;
        if (gaussian) {
          const double d2 = (s - ctx.center).squared_norm();
          q = static_cast<float>(std::exp(-d2 / (2.0 * sigma * sigma)));
        }
        if (q > gm.Q.at(r, c)) {
          gm.Q.at(r, c) = q;
          gm.R.at(r, c) = static_cast<float>(ctx.r_value);
        }
      }
    }
  }
  return gm;
}

}  // namespace

std::pair<GraspMap, AnnotationMeta> gaussian_mask_label(const Scene& scene,
                                                        const CameraModel& cam,
                                                        double r_max_px) {
  AnnotationMeta meta;
  auto ctxs = build_contexts(scene, cam, r_max_px, &meta);
  return {rasterize(ctxs, cam.rows, cam.cols, true), std::move(meta)};
}

GraspMap binary_label(const Scene& scene, const CameraModel& cam,
                      double r_max_px) {
  auto ctxs = build_contexts(scene, cam, r_max_px, nullptr);
  return rasterize(ctxs, cam.rows, cam.cols, false);
}

void to_json(nlohmann::json& j, const ObjectAnnotation& a) {
  j = {{"object_id", a.object_id},
       {"center", {a.gaussian_center.x, a.gaussian_center.y}},
       {"radius_px", a.gaussian_radius},
       {"farthest_a", {a.farthest_a.x, a.farthest_a.y}},
       {"farthest_b", {a.farthest_b.x, a.farthest_b.y}}};
}

void from_json(const nlohmann::json& j, ObjectAnnotation& a) {
  j.at("object_id").get_to(a.object_id);
  a.gaussian_center = {j.at("center").at(0).get<double>(),
                       j.at("center").at(1).get<double>()};
  j.at("radius_px").get_to(a.gaussian_radius);
  a.farthest_a = {j.at("farthest_a").at(0).get<double>(),
                  j.at("farthest_a").at(1).get<double>()};
  a.farthest_b = {j.at("farthest_b").at(0).get<double>(),
                  j.at("farthest_b").at(1).get<double>()};
}

void to_json(nlohmann::json& j, const AnnotationMeta& m) {
  j = {{"objects", m.objects}};
}

void from_json(const nlohmann::json& j, AnnotationMeta& m) {
  j.at("objects").get_to(m.objects);
}

}  // namespace tgrasp
