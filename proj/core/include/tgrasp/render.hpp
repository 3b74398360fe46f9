#pragma once

#include "tgrasp/camera.hpp"
#include "tgrasp/image.hpp"
#include "tgrasp/scene.hpp"

namespace tgrasp {

/// Rendering constants of the pseudo-transparent raster model.
struct RenderParams {
  double warp_strength_px = 6.0;   // radial warp inside object interiors
  double attenuation = 0.85;       // interior brightness factor
  double rim_width_px = 2.0;       // highlight band around the boundary
  double rim_contrast = 0.25;      // additive highlight
  double ripple_amp_px = 4.0;      // water_dynamic full-image warp
  double ripple_wavelength_px = 24.0;
};

/// Footprint polygon projected into image pixels at the object's top height.
Polygon project_footprint(const ObjectInstance& obj, const CameraModel& cam);

/// Deterministic pseudo-transparent render: interiors show warped, attenuated
/// background plus a rim highlight; everything scaled by lighting gain and
/// clamped to [0,1].
ImageRGB render_rgb(const Scene& scene, const CameraModel& cam,
                    const RenderParams& params = {});

}  // namespace tgrasp
