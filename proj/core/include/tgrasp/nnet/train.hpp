#pragma once

#include <vector>

#include "tgrasp/annotate.hpp"
#include "tgrasp/image.hpp"
#include "tgrasp/nnet/model.hpp"

namespace tgrasp::nnet {

struct DetectionSample {
  std::vector<float> chw;  // 3*H*W planar image
  Raster q_target;
  Raster r_target;
};

struct TrainConfig {
  double lr = 1e-3;
  double momentum = 0.9;
  int batch = 8;
  int epochs = 10;
  uint64_t seed = 0;
};

std::vector<float> image_to_chw(const ImageRGB& img);

/// One Huber-loss evaluation of the model on a batch (no update).
double batch_loss(Tgcnn<float>& model, const std::vector<DetectionSample>& data,
                  const std::vector<size_t>& indices);

/// Adam training (beta1 = cfg.momentum). Returns the per-epoch mean loss
/// curve; the final entry is never above the first for a converging run.
/// Deterministic for a fixed seed. Throws on an empty dataset.
std::vector<double> train(Tgcnn<float>& model,
                          const std::vector<DetectionSample>& data,
                          const TrainConfig& cfg);

/// Eval-mode forward pass on one image.
GraspMap predict(Tgcnn<float>& model, const std::vector<float>& chw, int h,
                 int w);

}  // namespace tgrasp::nnet
