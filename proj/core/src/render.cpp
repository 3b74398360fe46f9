#include "tgrasp/render.hpp"

#include <algorithm>
#include <cmath>

namespace tgrasp {

Polygon project_footprint(const ObjectInstance& obj, const CameraModel& cam) {
  Polygon out;
  out.reserve(obj.footprint.size());
  for (const auto& v : obj.footprint)
    out.push_back(cam.project({v.x, v.y, obj.top_height_mm}));
  return out;
}

namespace {

struct ProjectedObject {
  const ObjectInstance* obj;
  Polygon poly;   // image px
  Vec2 center;    // image px
  double max_radius_px;
  double min_u, max_u, min_v, max_v;
};

}  // namespace

ImageRGB render_rgb(const Scene& scene, const CameraModel& cam,
                    const RenderParams& params) {
  ImageRGB img(cam.rows, cam.cols);

  std::vector<ProjectedObject> projected;
  projected.reserve(scene.objects.size());
  for (const auto& obj : scene.objects) {
    ProjectedObject po;
    po.obj = &obj;
    po.poly = project_footprint(obj, cam);
    po.center = polygon_centroid(po.poly);
    po.max_radius_px = 0.0;
    po.min_u = po.min_v = 1e18;
    po.max_u = po.max_v = -1e18;
    for (const auto& v : po.poly) {
      po.max_radius_px = std::max(po.max_radius_px, (v - po.center).norm());
      po.min_u = std::min(po.min_u, v.x);
      po.max_u = std::max(po.max_u, v.x);
      po.min_v = std::min(po.min_v, v.y);
      po.max_v = std::max(po.max_v, v.y);
    }
    projected.push_back(std::move(po));
  }

  const double base_plane = scene.support.base_height_mm;
  const float gain = static_cast<float>(scene.lighting_gain);

  auto background_at = [&](const Vec2& px) -> std::array<float, 3> {
    Eigen::Vector3d w;
    try {
      w = cam.backproject(px, base_plane);
    } catch (const std::domain_error&) {
      return {0.0f, 0.0f, 0.0f};
    }
    return scene.background.sample(w.x(), w.y());
  };

  const bool water = scene.kind == SceneKind::water_dynamic;

  for (int r = 0; r < cam.rows; ++r) {
    for (int c = 0; c < cam.cols; ++c) {
      Vec2 s(c + 0.5, r + 0.5);
      if (water) {
        const double k = 2.0 * M_PI / params.ripple_wavelength_px;
        s.x += params.ripple_amp_px * std::sin(k * s.y + scene.ripple_phase);
        s.y += params.ripple_amp_px *
               std::sin(k * s.x + 1.7 * scene.ripple_phase);
      }

      const ProjectedObject* hit = nullptr;
      for (const auto& po : projected) {
        if (s.x < po.min_u || s.x > po.max_u || s.y < po.min_v || s.y > po.max_v)
          continue;
        if (!point_in_polygon(po.poly, s)) continue;
        if (!hit || po.obj->top_height_mm > hit->obj->top_height_mm) hit = &po;
      }

      std::array<float, 3> col;
      if (hit) {
        // Interior: background seen through a fixed radial warp.
        Vec2 rel = s - hit->center;
        const double d = rel.norm();
        Vec2 sw = s;
        if (d > 1e-9 && hit->max_radius_px > 1e-9) {
          const double push = params.warp_strength_px *
                              (1.0 - std::min(1.0, d / hit->max_radius_px));
          sw = s + rel * (push / d);
        }
        col = background_at(sw);
        for (auto& ch : col)
          ch = static_cast<float>(ch * params.attenuation) * gain;
        if (distance_to_boundary(hit->poly, s) <= params.rim_width_px)
          for (auto& ch : col) ch += static_cast<float>(params.rim_contrast);
      } else {
        col = background_at(s);
        for (auto& ch : col) ch *= gain;
      }
      for (int ch = 0; ch < 3; ++ch)
        img.at(r, c, ch) = std::clamp(col[ch], 0.0f, 1.0f);
    }
  }
  return img;
}

}  // namespace tgrasp
