#include "tgrasp/nnet/detector.hpp"

#include <cmath>
#include <random>

#include "tgrasp/nnet/train.hpp"
#include "tgrasp/render.hpp"

namespace tgrasp::nnet {

namespace {

void splat_gaussian(Raster& q, Raster& r, const Vec2& center, double sigma_px,
                    double amplitude, double r_value) {
  const double reach = 3.0 * sigma_px;
  const int r0 = std::max(0, static_cast<int>(std::floor(center.y - reach)));
  const int r1 = std::min(q.rows - 1, static_cast<int>(std::ceil(center.y + reach)));
  const int c0 = std::max(0, static_cast<int>(std::floor(center.x - reach)));
  const int c1 = std::min(q.cols - 1, static_cast<int>(std::ceil(center.x + reach)));
  for (int ri = r0; ri <= r1; ++ri) {
    for (int ci = c0; ci <= c1; ++ci) {
      const Vec2 s(ci + 0.5, ri + 0.5);
      const double d2 = (s - center).squared_norm();
      const float val =
          static_cast<float>(amplitude * std::exp(-d2 / (2.0 * sigma_px * sigma_px)));
      if (val > q.at(ri, ci)) {
        q.at(ri, ci) = val;
        r.at(ri, ci) = static_cast<float>(r_value);
      }
    }
  }
}

}  // namespace

Detector make_oracle_detector(double r_max_px, const OracleNoise& noise) {
  return [r_max_px, noise](const Scene& scene, const CameraModel& cam) -> GraspMap {
    if (noise.center_jitter_mm == 0.0 && noise.false_positive_blobs == 0) {
      auto [gm, meta] = gaussian_mask_label(scene, cam, r_max_px);
      return gm;
    }
    auto [gm_clean, meta] = gaussian_mask_label(scene, cam, r_max_px);
    GraspMap gm;
    gm.Q = Raster(cam.rows, cam.cols, 0.0f);
    gm.R = Raster(cam.rows, cam.cols, 0.0f);
    std::mt19937_64 rng(noise.seed ^ (scene.seed * 0x9e3779b97f4a7c15ULL));
    std::normal_distribution<double> jitter(0.0, noise.center_jitter_mm);
    for (const auto& ann : meta.objects) {
      Vec2 c = ann.gaussian_center;
      if (noise.center_jitter_mm > 0.0) {
        const double scale = cam.ground_scale(c, scene.support.base_height_mm);
        c.x += jitter(rng) / scale;
        c.y += jitter(rng) / scale;
      }
      const double r_value = std::min(ann.gaussian_radius, r_max_px) / r_max_px;
      splat_gaussian(gm.Q, gm.R, c, ann.gaussian_radius / 3.0, 1.0, r_value);
    }
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < noise.false_positive_blobs; ++i) {
      const Vec2 c(u01(rng) * cam.cols, u01(rng) * cam.rows);
      const double r_g = 10.0 + 20.0 * u01(rng);
      splat_gaussian(gm.Q, gm.R, c, r_g / 3.0, noise.false_positive_q,
                     std::min(r_g, r_max_px) / r_max_px);
    }
    return gm;
  };
}

Detector make_model_detector(std::shared_ptr<Tgcnn<float>> model) {
  return [model](const Scene& scene, const CameraModel& cam) -> GraspMap {
    const ImageRGB img = render_rgb(scene, cam);
    return predict(*model, image_to_chw(img), cam.rows, cam.cols);
  };
}

}  // namespace tgrasp::nnet
