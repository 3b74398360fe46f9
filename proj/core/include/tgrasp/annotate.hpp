#pragma once

#include <nlohmann/json.hpp>

#include "tgrasp/camera.hpp"
#include "tgrasp/image.hpp"
#include "tgrasp/render.hpp"
#include "tgrasp/scene.hpp"

namespace tgrasp {

/// Per-pixel grasp quality (Q) and normalized radius (R) rasters.
struct GraspMap {
  Raster Q;
  Raster R;
};

struct ObjectAnnotation {
  int object_id = 0;
  Vec2 gaussian_center;   // px
  double gaussian_radius = 0.0;  // px
  Vec2 farthest_a;        // px
  Vec2 farthest_b;        // px
};

struct AnnotationMeta {
  std::vector<ObjectAnnotation> objects;
};

/// Diameter pair of the footprint in world x-y, projected to pixels at
/// `plane_height`. Throws on degenerate polygons.
std::pair<Vec2, Vec2> farthest_pair(const Polygon& footprint,
                                    const CameraModel& cam,
                                    double plane_height);

std::pair<Vec2, Vec2> farthest_pair(const ObjectInstance& obj,
                                    const CameraModel& cam);

/// Gaussian-Mask labels: per object, Q is a Gaussian about the projected
/// farthest-pair midpoint restricted to the projected mask (sigma = r_g/3),
/// R is min(r_g, r_max)/r_max on the mask. Overlaps resolved by pixelwise
/// max of Q. Throws std::runtime_error("annotation clipped") when an object
/// projects outside the image.
std::pair<GraspMap, AnnotationMeta> gaussian_mask_label(const Scene& scene,
                                                        const CameraModel& cam,
                                                        double r_max_px);

/// Binary baseline: Q = 1 on masks, 0 elsewhere; R as above.
GraspMap binary_label(const Scene& scene, const CameraModel& cam,
                      double r_max_px);

void to_json(nlohmann::json& j, const ObjectAnnotation& a);
void from_json(const nlohmann::json& j, ObjectAnnotation& a);
void to_json(nlohmann::json& j, const AnnotationMeta& m);
void from_json(const nlohmann::json& j, AnnotationMeta& m);

}  // namespace tgrasp
