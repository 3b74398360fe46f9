#include "tgrasp/texture.hpp"

#include <cmath>

namespace tgrasp {

namespace {

// splitmix64-style integer hash.
uint64_t hash_u64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double hash_unit(uint64_t seed, int64_t ix, int64_t iy, uint64_t salt) {
  uint64_t h = hash_u64(seed ^ salt ^ (static_cast<uint64_t>(ix) * 0x9e3779b9ULL) ^
                        (static_cast<uint64_t>(iy) * 0x85ebca6bULL + 0x1234567ULL));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace

double value_noise(uint64_t seed, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int64_t ix = static_cast<int64_t>(fx);
  const int64_t iy = static_cast<int64_t>(fy);
  const double tx = smoothstep(x - fx);
  const double ty = smoothstep(y - fy);
  const double v00 = hash_unit(seed, ix, iy, 0);
  const double v10 = hash_unit(seed, ix + 1, iy, 0);
  const double v01 = hash_unit(seed, ix, iy + 1, 0);
  const double v11 = hash_unit(seed, ix + 1, iy + 1, 0);
  const double a = v00 + (v10 - v00) * tx;
  const double b = v01 + (v11 - v01) * tx;
  return a + (b - a) * ty;
}

std::array<float, 3> TextureSpec::sample(double x_mm, double y_mm) const {
  auto base_color = [&](uint64_t salt) {
    return static_cast<float>(0.15 + 0.7 * hash_unit(seed, 0, 0, salt));
  };
  switch (family) {
    case TextureFamily::solid: {
      return {base_color(1), base_color(2), base_color(3)};
    }
    case TextureFamily::stripes: {
      const double angle = hash_unit(seed, 0, 0, 9) * M_PI;
      const double u = x_mm * std::cos(angle) + y_mm * std::sin(angle);
      const bool on = std::fmod(std::floor(u / (scale_mm * 0.5)), 2.0) == 0.0;
      const float a = base_color(1), b = base_color(2);
      const float v = on ? a : b;
      return {v, on ? b : a, base_color(3)};
    }
    case TextureFamily::checker: {
      const int64_t cx = static_cast<int64_t>(std::floor(x_mm / scale_mm));
      const int64_t cy = static_cast<int64_t>(std::floor(y_mm / scale_mm));
      const bool on = ((cx + cy) & 1) == 0;
      const float lo = 0.1f + 0.2f * base_color(4);
      const float hi = 0.7f + 0.25f * base_color(5);
      const float v = on ? hi : lo;
      return {v, v, on ? lo : hi};
    }
    case TextureFamily::smooth_noise: {
      const double u = x_mm / scale_mm;
      const double w = y_mm / scale_mm;
      return {static_cast<float>(value_noise(seed, u, w)),
              static_cast<float>(value_noise(seed ^ 0xabcdULL, u, w)),
              static_cast<float>(value_noise(seed ^ 0x7777ULL, u, w))};
    }
  }
  return {0.0f, 0.0f, 0.0f};
}

void to_json(nlohmann::json& j, const TextureSpec& t) {
  j = nlohmann::json{{"family", t.family}, {"seed", t.seed}, {"scale_mm", t.scale_mm}};
}

void from_json(const nlohmann::json& j, TextureSpec& t) {
  j.at("family").get_to(t.family);
  j.at("seed").get_to(t.seed);
  j.at("scale_mm").get_to(t.scale_mm);
}

}  // namespace tgrasp
