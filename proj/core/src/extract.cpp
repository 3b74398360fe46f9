#include "tgrasp/nnet/extract.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tgrasp::nnet {

std::vector<ExtractedGrasp> extract_grasps(const Raster& q_map,
                                           const Raster& r_map, int k,
                                           const CameraModel& cam,
                                           double plane_height_hint,
                                           double r_max_px, double q_floor) {
  if (k < 1) throw std::invalid_argument("extract_grasps: k must be >= 1");
  if (q_map.rows != r_map.rows || q_map.cols != r_map.cols)
    throw std::invalid_argument("extract_grasps: Q/R shape mismatch");

  struct Peak {
    int r, c;
    float q;
  };
  std::vector<Peak> peaks;
  for (int r = 0; r < q_map.rows; ++r) {
    for (int c = 0; c < q_map.cols; ++c) {
      const float q = q_map.at(r, c);
      if (q <= q_floor) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int nr = r + dr, nc = c + dc;
          if (q_map.in_bounds(nr, nc) && q_map.at(nr, nc) > q) {
            is_max = false;
            break;
          }
        }
      if (is_max) peaks.push_back({r, c, q});
    }
  }

  // Quality descending; ties by smaller row-major index.
  std::stable_sort(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
    if (a.q != b.q) return a.q > b.q;
    return a.r * q_map.cols + a.c < b.r * q_map.cols + b.c;
  });

  std::vector<ExtractedGrasp> out;
  for (const auto& p : peaks) {
    if (static_cast<int>(out.size()) >= k) break;
    const double r_px = std::max(0.0, static_cast<double>(r_map.at(p.r, p.c))) *
                        r_max_px;
    const Vec2 s(p.c + 0.5, p.r + 0.5);
    bool suppressed = false;
    for (const auto& acc : out) {
      const double window = std::max(2.0, 2.0 * acc.image.r_px);
      if ((acc.image.s - s).norm() <= window) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) continue;
    ExtractedGrasp g;
    g.image = {s, r_px, p.q};
    const Eigen::Vector3d w = cam.backproject(s, plane_height_hint);
    g.world.p = {w.x(), w.y()};
    g.world.h = plane_height_hint;
    g.world.r = r_px * cam.ground_scale(s, plane_height_hint);
    out.push_back(g);
  }
  return out;
}

}  // namespace tgrasp::nnet
