#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgrasp/annotate.hpp"
#include "tgrasp/fuse.hpp"
#include "tgrasp/nnet/model.hpp"
#include "tgrasp/strategy.hpp"
#include "tgrasp/tactile.hpp"

namespace tgrasp::harness {

enum class GodDenominator : int { union_area = 0, circle_area = 1 };

/// Grasp-overlap degree of a predicted grasp circle against a binary label
/// mask; a detection counts as correct above the 0.45 threshold.
struct GodResult {
  Circle circle_px;
  double god = 0.0;
  bool correct = false;
};

Raster rasterize_polygon(const Polygon& poly_px, int rows, int cols);

/// Pixel-raster overlap of the circle and the mask. Default reading is IoU;
/// the intersection-over-circle variant is kept for sensitivity checks.
double god(const Circle& circle_px, const Raster& mask,
           GodDenominator den = GodDenominator::union_area);

/// Scores the top-1 extracted grasp of `pred` against the label mask.
GodResult evaluate_detection(const GraspMap& pred, const Raster& mask,
                             double r_max_px, double threshold = 0.45,
                             GodDenominator den = GodDenominator::union_area);

/// One synthetic detection sample: scene, camera, render, labels, and the
/// rasterized object mask used by the overlap metric.
struct LabeledImage {
  Scene scene;
  CameraModel cam;
  ImageRGB image;
  GraspMap label;
  Raster mask;
  Vec2 center_px;  // annotation centre of the (single) object
};

struct DetectionSetConfig {
  int count = 500;
  std::vector<int> classes = {0, 3};
  std::vector<uint64_t> background_seeds;  // cycled through deterministically
  std::vector<TextureFamily> families = {TextureFamily::solid,
                                         TextureFamily::stripes,
                                         TextureFamily::checker,
                                         TextureFamily::smooth_noise};
  int image_size = 96;
  double object_scale_mm = 30.0;
  double r_max_px = 60.0;
  double lighting_gain = 1.0;
  bool binary_labels = false;
  uint64_t seed = 1;
};

std::vector<LabeledImage> make_detection_set(const DetectionSetConfig& cfg);

/// Renders + labels to disk (PPM/GMAP/scene JSON) with a checksum manifest.
void write_detection_set(const std::filesystem::path& dir,
                         const std::vector<LabeledImage>& set);
/// Reads images and labels back; throws on manifest or checksum mismatch.
std::vector<std::pair<ImageRGB, GraspMap>> read_detection_set(
    const std::filesystem::path& dir);

/// Full reload including scenes and camera; masks and annotation centres are
/// recomputed, so the result scores identically to the set that was written.
std::vector<LabeledImage> load_labeled_set(const std::filesystem::path& dir,
                                           double r_max_px);

std::shared_ptr<nnet::Tgcnn<float>> train_detector(
    const std::vector<LabeledImage>& set, int epochs, uint64_t seed,
    std::vector<double>* curve = nullptr, double lr = 1e-3, int batch = 8);

struct DetectionScore {
  double accuracy = 0.0;
  double mean_god = 0.0;
  double mean_center_dist_px = 0.0;  // argmax-of-Q to annotation centre
};

DetectionScore score_detector(nnet::Tgcnn<float>& model,
                              const std::vector<LabeledImage>& set,
                              double r_max_px, double threshold = 0.45,
                              GodDenominator den = GodDenominator::union_area);

struct ExperimentConfig {
  uint64_t seed = 1;
  int threads = 1;
  // detection (E1/E1b/E1c/E2/E3)
  int train_images = 500;
  int test_images = 200;
  int image_size = 96;
  int epochs = 20;
  double lr = 1e-2;
  int batch = 8;
  int train_backgrounds = 40;
  std::vector<int> train_classes = {0, 3};
  std::vector<int> unseen_classes = {1};
  double object_scale_mm = 30.0;
  double r_max_px = 60.0;
  double god_threshold = 0.45;
  GodDenominator denominator = GodDenominator::union_area;
  int label_ablation_seeds = 3;
  // episodes (E4-E7)
  int episodes = 200;
  int objects_per_scene = 3;
  double detector_jitter_mm = 20.0;  // 0.5 * gripper radius
  std::vector<double> tpe_pitches = {50.0, 100.0, 150.0};
  GripperSpec gripper;
  TactileNoise tactile_noise;
  strategy::StrategyConfig policy;
  // fusion (E4 classification stage)
  fuse::DatasetConfig fusion;
  fuse::TrainOptions fusion_train;
};

/// Metrics plus everything needed to regenerate them: rerunning with the
/// embedded config and seed reproduces the numbers exactly.
struct ExperimentReport {
  std::string id;
  nlohmann::json config;
  nlohmann::json metrics;
  uint64_t seed = 0;
};

/// Experiment ids: E1 unseen backgrounds + unseen classes, E1c label-form
/// ablation, E2 background-family sweep, E3 lighting sweep, E4 plane
/// grasping with/without fusion, E5 calibration vs direct on fragments,
/// E6 irregular scenes with stepwise descent, E7 lattice pitch sweep.
/// Throws std::invalid_argument on an unknown id.
ExperimentReport run_experiment(const std::string& id,
                                const ExperimentConfig& cfg);

void write_report(const std::filesystem::path& out_dir,
                  const ExperimentReport& report);

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

NLOHMANN_JSON_SERIALIZE_ENUM(GodDenominator,
                             {{GodDenominator::union_area, "union"},
                              {GodDenominator::circle_area, "circle"}})

}  // namespace tgrasp::harness
