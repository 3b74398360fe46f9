#pragma once

#include <cstdint>
#include <vector>

#include "tgrasp/nnet/layers.hpp"
#include "tgrasp/scene.hpp"
#include "tgrasp/tactile.hpp"

namespace tgrasp::fuse {

inline constexpr int kCropSize = 32;
inline constexpr int kVisualDim = kCropSize * kCropSize * 3;
inline constexpr int kRadialBins = 64;
inline constexpr int kTactileDim = kRadialBins + 2;  // bins + area + MEC radius
inline constexpr int kFeatureDim = kVisualDim + kTactileDim;
inline constexpr int kClasses = 6;

enum class Ablation : int { visual_only = 0, tactile_only = 1, fusion = 2 };

/// Input scaling for the visual block inside the classifier. Without it the
/// 3072-dim crop swamps the 66-dim tactile descriptor in the first layer and
/// fusion trains to ignore touch.
inline constexpr float kVisualScale = 0.01f;

/// One post-grasp observation: a visual crop centred on the object plus a
/// rotation-binned tactile shape descriptor. Feature layout:
/// [0, kVisualDim) crop CHW, then 64 radial-extent bins about the contact
/// MEC centre, then normalized contact area and MEC radius.
struct FusionSample {
  std::vector<float> features;  // kFeatureDim
  int label = -1;               // class id, -1 when unknown
};

FusionSample make_sample(const Scene& scene, const ObjectInstance& obj,
                         const GripperSpec& gripper, const TactileNoise& noise,
                         uint64_t noise_seed);

/// Zeroes the masked-out modality in place; fusion keeps everything.
void apply_ablation(std::vector<float>& features, Ablation ablation);

struct DatasetConfig {
  int train_per_class = 30;
  int test_per_class = 10;
  uint64_t seed = 7;
  double object_scale_mm = 30.0;
  bool heavy_background = false;  // fine-scale clutter that defeats the crop
  GripperSpec gripper;
  TactileNoise noise;
};

/// Single-object scenes per class; train and test use disjoint background
/// texture seeds so the split cannot leak through the visual crop.
struct Dataset {
  std::vector<FusionSample> train;
  std::vector<FusionSample> test;
};

Dataset make_dataset(const DatasetConfig& cfg);

struct TrainOptions {
  int epochs = 80;
  double lr = 1e-3;
  double momentum = 0.9;
  int batch = 16;
  uint64_t seed = 1;
};

inline void to_json(nlohmann::json& j, const DatasetConfig& c) {
  j = nlohmann::json{{"train_per_class", c.train_per_class},
                     {"test_per_class", c.test_per_class},
                     {"seed", c.seed},
                     {"object_scale_mm", c.object_scale_mm},
                     {"heavy_background", c.heavy_background},
                     {"gripper", c.gripper},
                     {"noise", c.noise}};
}
inline void from_json(const nlohmann::json& j, DatasetConfig& c) {
  c.train_per_class = j.value("train_per_class", c.train_per_class);
  c.test_per_class = j.value("test_per_class", c.test_per_class);
  c.seed = j.value("seed", c.seed);
  c.object_scale_mm = j.value("object_scale_mm", c.object_scale_mm);
  c.heavy_background = j.value("heavy_background", c.heavy_background);
  c.gripper = j.value("gripper", c.gripper);
  c.noise = j.value("noise", c.noise);
}

inline void to_json(nlohmann::json& j, const TrainOptions& o) {
  j = nlohmann::json{{"epochs", o.epochs},
                     {"lr", o.lr},
                     {"momentum", o.momentum},
                     {"batch", o.batch},
                     {"seed", o.seed}};
}
inline void from_json(const nlohmann::json& j, TrainOptions& o) {
  o.epochs = j.value("epochs", o.epochs);
  o.lr = j.value("lr", o.lr);
  o.momentum = j.value("momentum", o.momentum);
  o.batch = j.value("batch", o.batch);
  o.seed = j.value("seed", o.seed);
}

/// 3138-128-64-6 MLP on the shared tensor engine. Ablation is fixed per
/// classifier instance: masking is applied to every sample it sees.
class Classifier {
 public:
  Classifier(Ablation ablation, uint64_t init_seed);

  std::vector<double> train(const std::vector<FusionSample>& data,
                            const TrainOptions& opt);
  int classify(const FusionSample& sample,
               std::vector<float>* probs = nullptr);
  double accuracy(const std::vector<FusionSample>& data);
  Ablation ablation() const { return ablation_; }
  std::vector<nnet::ParamRef<float>> params();

 private:
  nnet::Tensor<float> forward(const std::vector<const FusionSample*>& batch);
  void backward(const nnet::Tensor<float>& dlogits);

  Ablation ablation_;
  nnet::Linear<float> l1_, l2_, l3_;
  nnet::ReLU<float> r1_, r2_;
};

}  // namespace tgrasp::fuse
