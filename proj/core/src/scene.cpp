#include "tgrasp/scene.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tgrasp {

double SupportField::height(double x_mm, double y_mm) const {
  switch (kind) {
    case SupportKind::flat:
    case SupportKind::water_dynamic:
      return base_height_mm;
    case SupportKind::undulating: {
      const double k = 2.0 * M_PI / wavelength_mm;
      return base_height_mm +
             amplitude_mm * std::sin(k * x_mm) * std::cos(k * y_mm);
    }
    case SupportKind::sand:
      return base_height_mm +
             amplitude_mm * (2.0 * value_noise(noise_seed, x_mm / wavelength_mm,
                                               y_mm / wavelength_mm) -
                             1.0);
  }
  return base_height_mm;
}

Polygon class_footprint(int class_id, const Vec2& center, double s) {
  switch (class_id % 6) {
    case 0: return make_regular_polygon(center, s, 64);
    case 1: {  // axis-aligned square, side 1.6*s
      const double h = 0.8 * s;
      return {{center.x - h, center.y - h}, {center.x + h, center.y - h},
              {center.x + h, center.y + h}, {center.x - h, center.y + h}};
    }
    case 2: return make_regular_polygon(center, 1.1 * s, 3, M_PI / 2.0);
    case 3: return make_regular_polygon(center, s, 6);
    case 4: return make_ellipse_polygon(center, 1.15 * s, 0.6 * s, 48);
    case 5: return make_star_polygon(center, 1.15 * s, 0.55 * s, 5, M_PI / 2.0);
  }
  return {};
}

namespace {

Polygon fragment_footprint(std::mt19937_64& rng, const Vec2& center, double s) {
  std::uniform_int_distribution<int> nverts(7, 11);
  std::uniform_real_distribution<double> rad(0.4, 1.0);
  const int n = nverts(rng);
  Polygon p;
  p.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    const double r = rad(rng) * s;
    p.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return p;
}

double footprint_diameter(const Polygon& poly) {
  auto [a, b] = diameter_pair(poly);
  return (a - b).norm();
}

}  // namespace

Scene generate_scene(const SceneSpec& spec, uint64_t seed) {
  if (spec.object_count < 0)
    throw std::invalid_argument("generate_scene: negative object count");
  Scene scene;
  scene.kind = spec.kind;
  scene.support = spec.support;
  scene.lighting_gain = spec.lighting_gain;
  scene.seed = seed;

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  scene.background.family = spec.background_family;
  scene.background.seed = rng();
  if (spec.kind == SceneKind::water_dynamic) {
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    scene.ripple_phase = ph(rng);
  }

  const bool allow_overlap =
      spec.kind == SceneKind::stacked || spec.kind == SceneKind::overlapping;
  const double extent = spec.workspace_half_extent_mm;
  std::uniform_real_distribution<double> pos(-extent, extent);
  std::uniform_real_distribution<double> obj_height(25.0, 45.0);
  std::uniform_int_distribution<size_t> pick(
      0, spec.class_pool.empty() ? 0 : spec.class_pool.size() - 1);

  int attempts = 0;
  for (int i = 0; i < spec.object_count; ++i) {
    ObjectInstance obj;
    obj.id = i;
    obj.class_id = spec.class_pool.empty() ? 0 : spec.class_pool[pick(rng)];

    bool stack_on_prev =
        spec.kind == SceneKind::stacked && !scene.objects.empty() && (i % 2 == 1);
    while (true) {
      if (++attempts > 1000)
        throw std::runtime_error(
            "generate_scene: could not place objects without overlap "
            "(over-dense spec)");
      Vec2 c;
      if (stack_on_prev) {
        c = scene.objects.back().centroid();
      } else {
        c = {pos(rng), pos(rng)};
      }
      Polygon fp = spec.fragment_footprints
                       ? fragment_footprint(rng, c, spec.object_scale_mm)
                       : class_footprint(obj.class_id, c,
                                         stack_on_prev ? 0.7 * spec.object_scale_mm
                                                       : spec.object_scale_mm);
      if (!polygon_is_simple(fp) || polygon_area(fp) <= 0.0) continue;
      if (!allow_overlap) {
        bool clash = false;
        for (const auto& other : scene.objects)
          if (polygons_overlap(fp, other.footprint)) { clash = true; break; }
        if (clash) continue;
      }
      obj.footprint = fp;
      const double support_h = scene.support.height(c.x, c.y);
      if (stack_on_prev) {
        obj.base_on_support = false;
        obj.base_height_mm = scene.objects.back().top_height_mm;
      } else {
        obj.base_on_support = true;
        obj.base_height_mm = support_h;
      }
      obj.top_height_mm = obj.base_height_mm + obj_height(rng);
      obj.graspable_diameter_mm = footprint_diameter(fp);
      break;
    }
    scene.objects.push_back(obj);
  }
  return scene;
}

JudgeResult judge_grasp(const Scene& scene, const WorldGrasp& g,
                        const GripperSpec& gripper) {
  const double capture = gripper.capture_radius_mm();
  JudgeResult res;
  double nearest = std::numeric_limits<double>::infinity();
  int nearest_idx = -1;
  int best_idx = -1;
  double best_top = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& obj = scene.objects[i];
    const double d = (obj.centroid() - g.p).norm();
    if (d < nearest) { nearest = d; nearest_idx = static_cast<int>(i); }
    if (d <= capture && obj.graspable_diameter_mm <= gripper.aperture_mm &&
        obj.top_height_mm > best_top) {
      best_top = obj.top_height_mm;
      best_idx = static_cast<int>(i);
    }
  }
  if (best_idx >= 0) {
    res.outcome = Outcome::success;
    res.object_index = best_idx;
  } else if (nearest_idx >= 0 && nearest > capture &&
             nearest <= gripper.radius_mm) {
    res.outcome = Outcome::slide;
    res.object_index = nearest_idx;
  } else {
    res.outcome = Outcome::miss;
  }
  return res;
}

void to_json(nlohmann::json& j, const SupportField& s) {
  j = {{"kind", s.kind}, {"base_height_mm", s.base_height_mm},
       {"amplitude_mm", s.amplitude_mm}, {"wavelength_mm", s.wavelength_mm},
       {"noise_seed", s.noise_seed}};
}

void from_json(const nlohmann::json& j, SupportField& s) {
  j.at("kind").get_to(s.kind);
  j.at("base_height_mm").get_to(s.base_height_mm);
  j.at("amplitude_mm").get_to(s.amplitude_mm);
  j.at("wavelength_mm").get_to(s.wavelength_mm);
  j.at("noise_seed").get_to(s.noise_seed);
}

void to_json(nlohmann::json& j, const ObjectInstance& o) {
  std::vector<std::array<double, 2>> fp;
  for (const auto& v : o.footprint) fp.push_back({v.x, v.y});
  j = {{"id", o.id}, {"class_id", o.class_id}, {"footprint", fp},
       {"base_height_mm", o.base_height_mm}, {"top_height_mm", o.top_height_mm},
       {"base_on_support", o.base_on_support},
       {"graspable_diameter_mm", o.graspable_diameter_mm}};
}

void from_json(const nlohmann::json& j, ObjectInstance& o) {
  j.at("id").get_to(o.id);
  j.at("class_id").get_to(o.class_id);
  o.footprint.clear();
  for (const auto& v : j.at("footprint"))
    o.footprint.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  j.at("base_height_mm").get_to(o.base_height_mm);
  j.at("top_height_mm").get_to(o.top_height_mm);
  j.at("base_on_support").get_to(o.base_on_support);
  j.at("graspable_diameter_mm").get_to(o.graspable_diameter_mm);
}

void to_json(nlohmann::json& j, const Scene& s) {
  j = {{"kind", s.kind}, {"support", s.support}, {"objects", s.objects},
       {"background", s.background}, {"lighting_gain", s.lighting_gain},
       {"ripple_phase", s.ripple_phase}, {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, Scene& s) {
  j.at("kind").get_to(s.kind);
  j.at("support").get_to(s.support);
  j.at("objects").get_to(s.objects);
  j.at("background").get_to(s.background);
  j.at("lighting_gain").get_to(s.lighting_gain);
  j.at("ripple_phase").get_to(s.ripple_phase);
  j.at("seed").get_to(s.seed);
}

void to_json(nlohmann::json& j, const SceneSpec& s) {
  j = {{"kind", s.kind}, {"object_count", s.object_count},
       {"class_pool", s.class_pool}, {"background_family", s.background_family},
       {"workspace_half_extent_mm", s.workspace_half_extent_mm},
       {"object_scale_mm", s.object_scale_mm},
       {"lighting_gain", s.lighting_gain}, {"support", s.support},
       {"fragment_footprints", s.fragment_footprints}};
}

void from_json(const nlohmann::json& j, SceneSpec& s) {
  j.at("kind").get_to(s.kind);
  j.at("object_count").get_to(s.object_count);
  j.at("class_pool").get_to(s.class_pool);
  j.at("background_family").get_to(s.background_family);
  j.at("workspace_half_extent_mm").get_to(s.workspace_half_extent_mm);
  j.at("object_scale_mm").get_to(s.object_scale_mm);
  j.at("lighting_gain").get_to(s.lighting_gain);
  j.at("support").get_to(s.support);
  j.at("fragment_footprints").get_to(s.fragment_footprints);
}

}  // namespace tgrasp
