#pragma once

#include <functional>
#include <memory>

#include "tgrasp/annotate.hpp"
#include "tgrasp/nnet/model.hpp"

namespace tgrasp::nnet {

/// Detection front-end: scene in, grasp map out.
using Detector = std::function<GraspMap(const Scene&, const CameraModel&)>;

struct OracleNoise {
  double center_jitter_mm = 0.0;   // std-dev of the Gaussian centre offset
  int false_positive_blobs = 0;
  double false_positive_q = 0.6;
  uint64_t seed = 0;
};

/// Ground-truth detector: Gaussian-Mask labels with optional centre jitter
/// and false-positive blobs. Jitter draws are deterministic per (seed, scene
/// seed), so a detector is a pure function of its inputs.
Detector make_oracle_detector(double r_max_px, const OracleNoise& noise = {});

/// Trained-model detector; the model must outlive the returned closure.
Detector make_model_detector(std::shared_ptr<Tgcnn<float>> model);

}  // namespace tgrasp::nnet
