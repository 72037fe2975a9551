#include "fovqa/projection.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fovqa {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

void ViewportSpec::validate() const {
  if (out_width <= 0 || out_height <= 0)
    throw std::invalid_argument("viewport spec: output dimensions must be positive");
  if (!(fov_h_deg > 0 && fov_h_deg < 180))
    throw std::invalid_argument("viewport spec: horizontal FOV must be in (0, 180)");
  const double fv = effective_fov_v();
  if (!(fv > 0 && fv < 180))
    throw std::invalid_argument("viewport spec: vertical FOV must be in (0, 180)");
  if (yaw_deg < -180 || yaw_deg >= 180)
    throw std::invalid_argument("viewport spec: yaw must be in [-180, 180)");
  if (pitch_deg < -90 || pitch_deg > 90)
    throw std::invalid_argument("viewport spec: pitch must be in [-90, 90]");
}

void validate_equirect(const Image& img) {
  if (img.width != 2 * img.height)
    throw std::invalid_argument("equirect image must cover the full sphere (width == 2 * height)");
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("equirect image must have 1 or 3 channels");
}

std::pair<double, double> viewport_ray_to_equirect(double u_px, double v_px,
                                                   const ViewportSpec& spec, int equirect_width,
                                                   int equirect_height) {
  // Pinhole ray on the image plane at unit focal distance. The +0.5 places
  // pixel center (out_width-1)/2 exactly on the optical axis.
  const double half_x = std::tan(0.5 * spec.fov_h_deg * kDegToRad);
  const double half_y = std::tan(0.5 * spec.effective_fov_v() * kDegToRad);
  const double px = (2.0 * (u_px + 0.5) / spec.out_width - 1.0) * half_x;
  const double py = (1.0 - 2.0 * (v_px + 0.5) / spec.out_height) * half_y;

  // Camera frame: +z forward, +x right, +y up. Pitch rotates about x,
  // then yaw about y.
  const double cp = std::cos(spec.pitch_deg * kDegToRad);
  const double sp = std::sin(spec.pitch_deg * kDegToRad);
  const double cy = std::cos(spec.yaw_deg * kDegToRad);
  const double sy = std::sin(spec.yaw_deg * kDegToRad);

  const double x1 = px;
  const double y1 = py * cp + sp;
  const double z1 = -py * sp + cp;

  const double xw = x1 * cy + z1 * sy;
  const double yw = y1;
  const double zw = -x1 * sy + z1 * cy;

  const double norm = std::sqrt(xw * xw + yw * yw + zw * zw);
  const double lon_deg = std::atan2(xw, zw) * kRadToDeg;
  const double lat_deg = std::asin(std::clamp(yw / norm, -1.0, 1.0)) * kRadToDeg;

  return {(lon_deg / 360.0 + 0.5) * equirect_width, (0.5 - lat_deg / 180.0) * equirect_height};
}

double bilinear_sample(const Image& img, double x, double y, int channel) {
  const int w = img.width;
  const int h = img.height;
  double xf = std::floor(x);
  const double tx = x - xf;
  int x0 = static_cast<int>(xf) % w;
  if (x0 < 0) x0 += w;
  const int x1 = (x0 + 1) % w;  // longitude wraps

  const double yc = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int y0 = static_cast<int>(std::floor(yc));
  const int y1 = std::min(y0 + 1, h - 1);  // poles clamp
  const double ty = yc - y0;

  const double v00 = img.at(x0, y0, channel);
  const double v10 = img.at(x1, y0, channel);
  const double v01 = img.at(x0, y1, channel);
  const double v11 = img.at(x1, y1, channel);
  return (1 - tx) * ((1 - ty) * v00 + ty * v01) + tx * ((1 - ty) * v10 + ty * v11);
}

Image extract_viewport(const Image& equirect, const ViewportSpec& spec) {
  validate_equirect(equirect);
  spec.validate();
  Image out(spec.out_width, spec.out_height, equirect.channels, equirect.bit_depth);
  for (int v = 0; v < spec.out_height; ++v) {
    for (int u = 0; u < spec.out_width; ++u) {
      const auto [ex, ey] =
          viewport_ray_to_equirect(u, v, spec, equirect.width, equirect.height);
      for (int c = 0; c < equirect.channels; ++c)
        out.at(u, v, c) = static_cast<float>(bilinear_sample(equirect, ex, ey, c));
    }
  }
  return out;
}

}  // namespace fovqa
