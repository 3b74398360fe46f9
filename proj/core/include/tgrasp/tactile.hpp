#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tgrasp/geometry.hpp"
#include "tgrasp/gripper.hpp"
#include "tgrasp/image.hpp"
#include "tgrasp/scene.hpp"

namespace tgrasp {

/// Binary contact raster captured at a gripper pose.
struct TactileFrame {
  BinaryFrame contact;  // T x T
  Vec2 pose_p;          // gripper axis, world mm
  double pose_h = 0.0;  // gripper centre height, mm
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Segmented contact region with its minimum enclosing circle, gripper-frame mm.
struct ContactRegion {
  std::vector<std::pair<int, int>> pixels;  // (row, col) in the frame
  Circle mec_mm;                            // centre in gripper-frame mm
  bool has_contact = false;
};

struct TactileNoise {
  double salt_pepper_rate = 0.01;
  bool morphological_step = true;
};

inline void to_json(nlohmann::json& j, const TactileNoise& n) {
  j = nlohmann::json{{"salt_pepper_rate", n.salt_pepper_rate},
                     {"morphological_step", n.morphological_step}};
}
inline void from_json(const nlohmann::json& j, TactileNoise& n) {
  n.salt_pepper_rate = j.value("salt_pepper_rate", n.salt_pepper_rate);
  n.morphological_step = j.value("morphological_step", n.morphological_step);
}

/// Simulated tactile capture. A pixel at gripper-local offset d is in contact
/// iff |d| <= rho and some object covers p+d with top height >= h - sag(|d|),
/// sag(l) = rho - sqrt(rho^2 - l^2). Then seeded salt-pepper flips and one
/// dilation-or-erosion step.
TactileFrame sense(const Scene& scene, const GripperSpec& gripper,
                   const Vec2& p, double h, uint64_t noise_seed,
                   const TactileNoise& noise = {});

/// Majority filter (3x3) then largest 4-connected component. Regions smaller
/// than min_area_px report no contact.
ContactRegion segment(const TactileFrame& frame, const GripperSpec& gripper,
                      int min_area_px = 20);

/// Smallest circle containing all points (Welzl). Throws on an empty set.
Circle min_enclosing_circle(const std::vector<Vec2>& points);

/// d = z - t, z the gripper axis (frame origin), t the MEC centre in mm.
/// Throws std::runtime_error("no contact") on an empty region.
Vec2 calibration_offset(const ContactRegion& region);

/// Applying a calibration displacement moves the gripper onto the contact
/// centre: new position = p - d.
Vec2 apply_calibration_move(const Vec2& p, const Vec2& d);

struct AhdParams {
  double press_gain = 0.35;  // alpha
  double r_min_mm = 5.0;
  double r_max_mm = 30.0;
};

inline void to_json(nlohmann::json& j, const AhdParams& p) {
  j = nlohmann::json{{"press_gain", p.press_gain},
                     {"r_min_mm", p.r_min_mm},
                     {"r_max_mm", p.r_max_mm}};
}
inline void from_json(const nlohmann::json& j, AhdParams& p) {
  p.press_gain = j.value("press_gain", p.press_gain);
  p.r_min_mm = j.value("r_min_mm", p.r_min_mm);
  p.r_max_mm = j.value("r_max_mm", p.r_max_mm);
}

/// Adaptive height-dropping: press depth grows with predicted radius.
double adaptive_drop_height(double r_hat_mm, double contact_h_mm,
                            const AhdParams& params = {});

}  // namespace tgrasp
