#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgrasp/geometry.hpp"
#include "tgrasp/gripper.hpp"
#include "tgrasp/texture.hpp"

namespace tgrasp {

enum class SupportKind : int { flat = 0, undulating = 1, sand = 2, water_dynamic = 3 };

struct SupportField {
  SupportKind kind = SupportKind::flat;
  double base_height_mm = 0.0;
  double amplitude_mm = 0.0;
  double wavelength_mm = 150.0;
  uint64_t noise_seed = 0;

  /// Finite and deterministic for a fixed seed; flat returns base everywhere.
  double height(double x_mm, double y_mm) const;
};

struct ObjectInstance {
  int id = 0;
  int class_id = 0;  // 6 proxy classes
  Polygon footprint;  // simple polygon, world mm
  double base_height_mm = 0.0;  // bottom of the object (support or stack below)
  double top_height_mm = 0.0;
  bool base_on_support = true;
  double graspable_diameter_mm = 0.0;

  Vec2 centroid() const { return polygon_centroid(footprint); }
};

enum class SceneKind : int {
  plane = 0,
  fragments = 1,
  stacked = 2,
  overlapping = 3,
  undulating = 4,
  sand = 5,
  water_dynamic = 6
};

struct Scene {
  SceneKind kind = SceneKind::plane;
  SupportField support;
  std::vector<ObjectInstance> objects;
  TextureSpec background;
  double lighting_gain = 1.0;   // in [0.1, 2.5]
  double ripple_phase = 0.0;    // water_dynamic only
  uint64_t seed = 0;
};

struct SceneSpec {
  SceneKind kind = SceneKind::plane;
  int object_count = 1;
  std::vector<int> class_pool = {0, 1, 2, 3, 4, 5};
  TextureFamily background_family = TextureFamily::checker;
  double workspace_half_extent_mm = 180.0;  // objects placed in +-extent square
  double object_scale_mm = 30.0;            // nominal footprint radius
  double lighting_gain = 1.0;
  SupportField support;
  bool fragment_footprints = false;  // random star polygons (glass fragments)
};

/// Deterministic procedural scene generation. Throws std::runtime_error when
/// the spec cannot be placed without overlap after 1000 attempts.
Scene generate_scene(const SceneSpec& spec, uint64_t seed);

/// Proxy footprint for one of the 6 object classes, centred at `center`.
Polygon class_footprint(int class_id, const Vec2& center, double scale_mm);

enum class Outcome : int { success = 0, miss = 1, slide = 2, collision = 3 };

struct WorldGrasp {
  Vec2 p;          // mm, world x-y
  double h = 0.0;  // mm, gripper centre height
  double r = 0.0;  // mm, grasp radius
};

struct JudgeResult {
  Outcome outcome = Outcome::miss;
  int object_index = -1;  // index into scene.objects when success/slide
};

/// Ground-truth grasp outcome. Success: some object's centroid within
/// kappa*rho of g.p and its graspable diameter fits the aperture; among
/// eligible objects the topmost is enveloped. Slide: nearest centroid in
/// (kappa*rho, rho]. Miss otherwise.
JudgeResult judge_grasp(const Scene& scene, const WorldGrasp& g,
                        const GripperSpec& gripper);

NLOHMANN_JSON_SERIALIZE_ENUM(SupportKind,
                             {{SupportKind::flat, "flat"},
                              {SupportKind::undulating, "undulating"},
                              {SupportKind::sand, "sand"},
                              {SupportKind::water_dynamic, "water_dynamic"}})

NLOHMANN_JSON_SERIALIZE_ENUM(SceneKind,
                             {{SceneKind::plane, "plane"},
                              {SceneKind::fragments, "fragments"},
                              {SceneKind::stacked, "stacked"},
                              {SceneKind::overlapping, "overlapping"},
                              {SceneKind::undulating, "undulating"},
                              {SceneKind::sand, "sand"},
                              {SceneKind::water_dynamic, "water_dynamic"}})

void to_json(nlohmann::json& j, const SupportField& s);
void from_json(const nlohmann::json& j, SupportField& s);
void to_json(nlohmann::json& j, const ObjectInstance& o);
void from_json(const nlohmann::json& j, ObjectInstance& o);
void to_json(nlohmann::json& j, const Scene& s);
void from_json(const nlohmann::json& j, Scene& s);
void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);

}  // namespace tgrasp
