#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tgrasp/geometry.hpp"

namespace tgrasp {

/// Pinhole camera. Pose maps world coordinates (mm) into the camera frame:
/// x_cam = R * x_world + t, with the optical axis along +z.
struct CameraModel {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  int rows = 480;
  int cols = 640;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double tilt = 0.0;  // rad, in [0, pi/24]

  void validate() const;

  /// World point (mm) to pixel (u = col, v = row).
  Vec2 project(const Eigen::Vector3d& world) const;

  /// Pixel ray intersected with the horizontal plane z = plane_height.
  /// Throws std::domain_error when the ray is parallel to the plane.
  Eigen::Vector3d backproject(const Vec2& pixel, double plane_height) const;

  Eigen::Vector3d camera_center() const;

  /// Millimetres per pixel on the plane z = plane_height, measured at `pixel`.
  double ground_scale(const Vec2& pixel, double plane_height) const;
};

/// Camera looking down at the workspace from `height` above the origin,
/// optionally tilted about the x axis.
CameraModel make_overhead_camera(double height, double tilt = 0.0,
                                 int rows = 480, int cols = 640,
                                 double focal = 600.0);

void to_json(nlohmann::json& j, const CameraModel& cam);
void from_json(const nlohmann::json& j, CameraModel& cam);

}  // namespace tgrasp
