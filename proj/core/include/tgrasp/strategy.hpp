#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgrasp/nnet/detector.hpp"
#include "tgrasp/nnet/extract.hpp"
#include "tgrasp/scene.hpp"
#include "tgrasp/tactile.hpp"

namespace tgrasp::strategy {

enum class Mode : int { vision_first = 0, vision_touch = 1, touch_first = 2 };

struct Region {
  double min_x = -200.0, min_y = -200.0, max_x = 200.0, max_y = 200.0;
};

struct StrategyConfig {
  Mode mode = Mode::vision_first;
  double q_threshold = 0.25;
  int max_calib_iters = 5;
  double calib_tol_mm = 2.0;
  double descent_step_mm = 5.0;  // delta
  double floor_height_mm = 0.0;
  double start_height_mm = 100.0;
  double tpe_step_mm = 50.0;  // L
  Region tpe_region;
  int k = 5;
  double r_max_px = 60.0;
  double mark_radius_mm = 25.0;
  double t_probe_s = 4.0;
  double t_move_s = 1.0;
  int max_attempts = 50;
  uint64_t noise_seed = 0;
  TactileNoise tactile_noise;
  AhdParams ahd;
};

enum class AttemptResult : int {
  success = 0,
  miss = 1,
  slide = 2,
  wrong_point = 3,
  ambiguous = 4,
  not_found = 5
};

struct Attempt {
  Vec2 target;        // commanded position, mm
  Vec2 final_position;
  Vec2 contact_point;            // world point of the innermost contact pixel
  double contact_height_mm = 0.0;  // declared (sag-corrected) contact height
  bool had_contact = false;
  int calib_iters = 0;
  AttemptResult result = AttemptResult::miss;
  int grasped_object_id = -1;
  int predicted_class = -1;
};

struct EpisodeRecord {
  uint64_t scene_seed = 0;
  uint64_t policy_seed = 0;
  Mode mode = Mode::vision_first;
  std::vector<nnet::ExtractedGrasp> detections;  // last detector output used
  std::vector<nlohmann::json> events;            // one JSON object per event
  std::vector<Attempt> attempts;
  std::vector<int> grasped_object_ids;  // in grasp order
  int probe_count = 0;
  int move_count = 0;
  int calib_count = 0;
  double simulated_time_s = 0.0;
  double wallclock_ms = 0.0;
  int objects_initial = 0;

  int objects_grasped() const { return static_cast<int>(grasped_object_ids.size()); }
};

/// Visited-region mask: previously handled or falsely detected points are
/// never revisited.
class MarkMask {
 public:
  void mark(const Vec2& center, double radius_mm) {
    marks_.push_back({center, radius_mm});
  }
  bool contains(const Vec2& p) const {
    for (const auto& m : marks_)
      if ((p - m.center).norm() <= m.radius) return true;
    return false;
  }
  size_t size() const { return marks_.size(); }

 private:
  struct Mark {
    Vec2 center;
    double radius;
  };
  std::vector<Mark> marks_;
};

/// Optional post-grasp classification stage (visual-tactile fusion lives in
/// the fuse module; the executor only records the verdict).
using ClassifierHook =
    std::function<std::pair<int, double>(const Scene&, const ObjectInstance&)>;

/// Plane scenes: detect, touch-verify, calibrate, grasp, mark.
EpisodeRecord run_vision_first(const Scene& scene, const CameraModel& cam,
                               const nnet::Detector& detector,
                               const GripperSpec& gripper,
                               const StrategyConfig& cfg,
                               const ClassifierHook& classifier = nullptr);

/// Irregular scenes: detect position only, recover height by stepwise
/// descent (THS), then calibrate and grasp.
EpisodeRecord run_vision_touch(const Scene& scene, const CameraModel& cam,
                               const nnet::Detector& detector,
                               const GripperSpec& gripper,
                               const StrategyConfig& cfg,
                               const ClassifierHook& classifier = nullptr);

/// Visually undetectable scenes: boustrophedon lattice probing (TPE), then
/// THS descent, calibration and grasp on first contact.
EpisodeRecord run_touch_first(const Scene& scene, const GripperSpec& gripper,
                              const StrategyConfig& cfg,
                              const ClassifierHook& classifier = nullptr);

/// Boustrophedon probe order over the region with pitch L.
std::vector<Vec2> boustrophedon_lattice(const Region& region, double pitch_mm);

void write_episode_jsonl(const std::filesystem::path& path,
                         const EpisodeRecord& record);

void to_json(nlohmann::json& j, const Region& r);
void from_json(const nlohmann::json& j, Region& r);
void to_json(nlohmann::json& j, const StrategyConfig& c);
void from_json(const nlohmann::json& j, StrategyConfig& c);

NLOHMANN_JSON_SERIALIZE_ENUM(Mode, {{Mode::vision_first, "vision_first"},
                                    {Mode::vision_touch, "vision_touch"},
                                    {Mode::touch_first, "touch_first"}})

}  // namespace tgrasp::strategy
