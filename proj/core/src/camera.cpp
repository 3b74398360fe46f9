#include "tgrasp/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace tgrasp {

void CameraModel::validate() const {
  if (tilt < 0.0 || tilt > M_PI / 24.0 + 1e-12)
    throw std::invalid_argument("CameraModel: tilt outside [0, pi/24]");
  if (fx <= 0.0 || fy <= 0.0 || rows <= 0 || cols <= 0)
    throw std::invalid_argument("CameraModel: bad intrinsics");
}

Vec2 CameraModel::project(const Eigen::Vector3d& world) const {
  const Eigen::Vector3d c = rotation * world + translation;
  if (c.z() <= 0.0)
    throw std::domain_error("project: point behind camera");
  return {fx * c.x() / c.z() + cx, fy * c.y() / c.z() + cy};
}

Eigen::Vector3d CameraModel::camera_center() const {
  return -rotation.transpose() * translation;
}

Eigen::Vector3d CameraModel::backproject(const Vec2& pixel,
                                         double plane_height) const {
  const Eigen::Vector3d dir_cam((pixel.x - cx) / fx, (pixel.y - cy) / fy, 1.0);
  const Eigen::Vector3d dir = rotation.transpose() * dir_cam;
  const Eigen::Vector3d origin = camera_center();
  if (std::abs(dir.z()) < 1e-12)
    throw std::domain_error("backproject: ray parallel to plane, no intersection");
  const double s = (plane_height - origin.z()) / dir.z();
  return origin + s * dir;
}

double CameraModel::ground_scale(const Vec2& pixel, double plane_height) const {
  const Eigen::Vector3d a = backproject(pixel, plane_height);
  const Eigen::Vector3d b = backproject({pixel.x + 1.0, pixel.y}, plane_height);
  return (b - a).norm();
}

CameraModel make_overhead_camera(double height, double tilt, int rows, int cols,
                                 double focal) {
  CameraModel cam;
  cam.fx = cam.fy = focal;
  cam.cx = cols / 2.0;
  cam.cy = rows / 2.0;
  cam.rows = rows;
  cam.cols = cols;
  cam.tilt = tilt;

  // Nadir view: camera x aligned with world x, optical axis along -z world.
  Eigen::Matrix3d base;
  base << 1, 0, 0,
          0, -1, 0,
          0, 0, -1;
  Eigen::Matrix3d rx;
  rx << 1, 0, 0,
        0, std::cos(tilt), -std::sin(tilt),
        0, std::sin(tilt), std::cos(tilt);
  cam.rotation = rx * base;
  const Eigen::Vector3d center(0.0, 0.0, height);
  cam.translation = -cam.rotation * center;
  cam.validate();
  return cam;
}

void to_json(nlohmann::json& j, const CameraModel& cam) {
  std::vector<double> r(cam.rotation.data(), cam.rotation.data() + 9);
  j = nlohmann::json{{"fx", cam.fx}, {"fy", cam.fy},
                     {"cx", cam.cx}, {"cy", cam.cy},
                     {"rows", cam.rows}, {"cols", cam.cols},
                     {"rotation_colmajor", r},
                     {"translation", {cam.translation.x(), cam.translation.y(),
                                      cam.translation.z()}},
                     {"tilt", cam.tilt}};
}

void from_json(const nlohmann::json& j, CameraModel& cam) {
  j.at("fx").get_to(cam.fx);
  j.at("fy").get_to(cam.fy);
  j.at("cx").get_to(cam.cx);
  j.at("cy").get_to(cam.cy);
  j.at("rows").get_to(cam.rows);
  j.at("cols").get_to(cam.cols);
  std::vector<double> r = j.at("rotation_colmajor").get<std::vector<double>>();
  if (r.size() != 9) throw std::invalid_argument("camera json: bad rotation");
  cam.rotation = Eigen::Map<Eigen::Matrix3d>(r.data());
  std::vector<double> t = j.at("translation").get<std::vector<double>>();
  cam.translation = Eigen::Vector3d(t.at(0), t.at(1), t.at(2));
  j.at("tilt").get_to(cam.tilt);
  cam.validate();
}

}  // namespace tgrasp
