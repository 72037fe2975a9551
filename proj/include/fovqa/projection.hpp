#pragma once

#include <utility>

#include "fovqa/image.hpp"

namespace fovqa {

// Rectilinear viewport looking into an equirectangular sphere.
//
// Conventions, fixed across the toolkit:
//  - yaw in [-180, 180): positive turns east (image content right of the
//    front direction); pitch in [-90, 90]: positive looks up.
//  - equirect x = (longitude/360 + 0.5) * width, y = (0.5 - latitude/180)
//    * height, so the front direction lands at the image center.
//  - pixel centers sit on integer coordinates for sampling purposes.
struct ViewportSpec {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double fov_h_deg = 96.0;
  double fov_v_deg = 0.0;  // 0 = derive as fov_h * out_height / out_width
  int out_width = 0;
  int out_height = 0;

  double effective_fov_v() const {
    return fov_v_deg > 0 ? fov_v_deg : fov_h_deg * out_height / out_width;
  }
  void validate() const;
};

// Throws unless the raster is a full 360x180 sphere (width == 2 * height).
void validate_equirect(const Image& img);

// Continuous equirect coordinates hit by the ray through viewport pixel
// (u, v). u and v may be fractional; integer values address pixel centers.
std::pair<double, double> viewport_ray_to_equirect(double u_px, double v_px,
                                                   const ViewportSpec& spec, int equirect_width,
                                                   int equirect_height);

// Bilinear interpolation with horizontal wrap-around at the longitude seam
// and vertical clamping at the poles.
double bilinear_sample(const Image& img, double x, double y, int channel);

Image extract_viewport(const Image& equirect, const ViewportSpec& spec);

}  // namespace fovqa
