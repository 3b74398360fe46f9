#pragma once

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tgrasp {

/// Hemispherical jamming gripper abstracted to a contact disc.
struct GripperSpec {
  double radius_mm = 40.0;        // rho
  double aperture_mm = 70.0;      // max graspable diameter
  int tactile_resolution = 192;   // T, frame is T x T
  double px_per_mm = 2.0;
  double capture_ratio = 0.6;     // kappa

  void validate() const {
    if (tactile_resolution < 32)
      throw std::invalid_argument("GripperSpec: tactile resolution below 32");
    if (capture_ratio <= 0.0 || capture_ratio > 1.0)
      throw std::invalid_argument("GripperSpec: capture ratio outside (0,1]");
  }

  double capture_radius_mm() const { return capture_ratio * radius_mm; }
};

inline void to_json(nlohmann::json& j, const GripperSpec& g) {
  j = nlohmann::json{{"radius_mm", g.radius_mm},
                     {"aperture_mm", g.aperture_mm},
                     {"tactile_resolution", g.tactile_resolution},
                     {"px_per_mm", g.px_per_mm},
                     {"capture_ratio", g.capture_ratio}};
}

inline void from_json(const nlohmann::json& j, GripperSpec& g) {
  g.radius_mm = j.value("radius_mm", g.radius_mm);
  g.aperture_mm = j.value("aperture_mm", g.aperture_mm);
  g.tactile_resolution = j.value("tactile_resolution", g.tactile_resolution);
  g.px_per_mm = j.value("px_per_mm", g.px_per_mm);
  g.capture_ratio = j.value("capture_ratio", g.capture_ratio);
}

}  // namespace tgrasp
