#pragma once

#include <cstddef>
#include <vector>

namespace tgrasp {

/// Single-channel float raster, row-major.
struct Raster {
  int rows = 0;
  int cols = 0;
  std::vector<float> v;

  Raster() = default;
  Raster(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

  float& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  float at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  size_t size() const { return v.size(); }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows && c >= 0 && c < cols;
  }
};

/// Interleaved RGB float image, values in [0,1].
struct ImageRGB {
  int rows = 0;
  int cols = 0;
  std::vector<float> v;  // rows*cols*3, interleaved

  ImageRGB() = default;
  ImageRGB(int r, int c, float fill = 0.0f)
      : rows(r), cols(c), v(static_cast<size_t>(r) * c * 3, fill) {}

  float& at(int r, int c, int ch) {
    return v[(static_cast<size_t>(r) * cols + c) * 3 + ch];
  }
  float at(int r, int c, int ch) const {
    return v[(static_cast<size_t>(r) * cols + c) * 3 + ch];
  }
};

/// Binary raster used by the tactile sensor.
struct BinaryFrame {
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> v;

  BinaryFrame() = default;
  BinaryFrame(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0) {}

  uint8_t& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  uint8_t at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  bool any() const {
    for (uint8_t x : v)
      if (x) return true;
    return false;
  }
};

}  // namespace tgrasp
