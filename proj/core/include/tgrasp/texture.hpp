#pragma once

#include <array>
#include <cstdint>

#include <nlohmann/json.hpp>

namespace tgrasp {

enum class TextureFamily : int { solid = 0, stripes = 1, checker = 2, smooth_noise = 3 };

/// Procedural background texture over the world x-y plane (mm).
struct TextureSpec {
  TextureFamily family = TextureFamily::solid;
  uint64_t seed = 0;
  double scale_mm = 60.0;  // stripe pitch / checker cell / noise feature size

  /// RGB in [0,1] at a world plane point. Deterministic in (spec, x, y).
  std::array<float, 3> sample(double x_mm, double y_mm) const;
};

NLOHMANN_JSON_SERIALIZE_ENUM(TextureFamily,
                             {{TextureFamily::solid, "solid"},
                              {TextureFamily::stripes, "stripes"},
                              {TextureFamily::checker, "checker"},
                              {TextureFamily::smooth_noise, "smooth_noise"}})

void to_json(nlohmann::json& j, const TextureSpec& t);
void from_json(const nlohmann::json& j, TextureSpec& t);

/// Seeded value noise in [0,1], smooth in (x, y). Feature size ~= 1 unit.
double value_noise(uint64_t seed, double x, double y);

}  // namespace tgrasp
