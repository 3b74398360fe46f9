#pragma once

#include <vector>

#include "tgrasp/camera.hpp"
#include "tgrasp/image.hpp"
#include "tgrasp/scene.hpp"

namespace tgrasp::nnet {

/// Image-space grasp: centre pixel, radius in px, quality.
struct GraspCandidate {
  Vec2 s;            // (u, v) px
  double r_px = 0.0;
  double q = 0.0;
};

struct ExtractedGrasp {
  GraspCandidate image;
  WorldGrasp world;
};

/// Top-k local maxima of Q with greedy non-maximum suppression over a
/// 2*r_hat window, sorted by quality descending; ties broken by smaller
/// row-major index. Candidates are lifted to world grasps on the plane
/// z = plane_height_hint.
std::vector<ExtractedGrasp> extract_grasps(const Raster& q_map,
                                           const Raster& r_map, int k,
                                           const CameraModel& cam,
                                           double plane_height_hint,
                                           double r_max_px,
                                           double q_floor = 0.0);

}  // namespace tgrasp::nnet
