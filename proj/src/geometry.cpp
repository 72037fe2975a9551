#include "fovqa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fovqa {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

void DisplayGeometry::validate() const {
  if (focal_length_mm <= 0 || lens_to_display_mm <= 0 || lens_to_eye_mm <= 0)
    throw std::invalid_argument("display geometry: lengths must be strictly positive");
  if (viewport_width_px <= 0 || viewport_height_px <= 0)
    throw std::invalid_argument("display geometry: pixel dimensions must be strictly positive");
  if (viewport_width_mm <= 0 || viewport_height_mm <= 0)
    throw std::invalid_argument("display geometry: physical dimensions must be strictly positive");
  if (lens_to_display_mm >= focal_length_mm)
    throw std::invalid_argument(
        "display geometry: display must sit inside the focal length (no virtual image otherwise)");
}

VirtualGeometry derive_virtual_geometry(const DisplayGeometry& d) {
  d.validate();
  const double magnification = d.focal_length_mm / (d.focal_length_mm - d.lens_to_display_mm);
  VirtualGeometry vg;
  vg.magnification = magnification;
  vg.lens_to_virtual_mm = d.lens_to_display_mm * magnification;
  vg.eye_to_virtual_mm = vg.lens_to_virtual_mm + d.lens_to_eye_mm;
  vg.width_px = d.viewport_width_px;
  vg.height_px = d.viewport_height_px;
  vg.width_mm = d.viewport_width_mm * magnification;
  vg.height_mm = d.viewport_height_mm * magnification;
  return vg;
}

double square_pixel_pitch_mm(double diagonal_mm, int width_px, int height_px) {
  if (diagonal_mm <= 0 || width_px <= 0 || height_px <= 0)
    throw std::invalid_argument("pixel pitch: all screen parameters must be positive");
  const double diag_px = std::hypot(static_cast<double>(width_px), static_cast<double>(height_px));
  return diagonal_mm / diag_px;
}

std::pair<double, double> degrees_per_pixel(const VirtualGeometry& vg) {
  const double dx = std::atan(vg.pitch_x_mm() / vg.eye_to_virtual_mm) * kRadToDeg;
  const double dy = std::atan(vg.pitch_y_mm() / vg.eye_to_virtual_mm) * kRadToDeg;
  return {dx, dy};
}

void ZoneScheme::validate() const {
  if (edges_deg.empty()) throw std::invalid_argument("zone scheme: needs at least one boundary");
  if (edges_deg.front() != 0.0) throw std::invalid_argument("zone scheme: first boundary must be 0");
  for (std::size_t i = 1; i < edges_deg.size(); ++i)
    if (!(edges_deg[i] > edges_deg[i - 1]))
      throw std::invalid_argument("zone scheme: boundaries must be strictly increasing");
}

double eccentricity_at(double x_px, double y_px, double fx_px, double fy_px,
                       const VirtualGeometry& vg) {
  const double dx_mm = (x_px - fx_px) * vg.pitch_x_mm();
  const double dy_mm = (y_px - fy_px) * vg.pitch_y_mm();
  const double dist_mm = std::hypot(dx_mm, dy_mm);
  return std::atan(dist_mm / vg.eye_to_virtual_mm) * kRadToDeg;
}

EccentricityMap eccentricity_map(const VirtualGeometry& vg, double fx_px, double fy_px) {
  if (fx_px < 0 || fx_px > vg.width_px - 1 || fy_px < 0 || fy_px > vg.height_px - 1)
    throw std::invalid_argument("eccentricity map: foveation point outside the raster");
  EccentricityMap em;
  em.foveation_x_px = fx_px;
  em.foveation_y_px = fy_px;
  em.deg = Map(vg.width_px, vg.height_px);
  for (int y = 0; y < vg.height_px; ++y)
    for (int x = 0; x < vg.width_px; ++x)
      em.deg.at(x, y) = eccentricity_at(x, y, fx_px, fy_px, vg);
  return em;
}

int zone_of(double ecc_deg, const ZoneScheme& scheme) {
  if (ecc_deg < 0) throw std::domain_error("zone_of: eccentricity must be non-negative");
  auto it = std::upper_bound(scheme.edges_deg.begin(), scheme.edges_deg.end(), ecc_deg);
  return static_cast<int>(it - scheme.edges_deg.begin()) - 1;
}

ZoneMap zone_map(const EccentricityMap& em, const ZoneScheme& scheme) {
  scheme.validate();
  ZoneMap zm(em.deg.width, em.deg.height);
  for (std::size_t i = 0; i < em.deg.data.size(); ++i)
    zm.zones[i] = zone_of(em.deg.data[i], scheme);
  return zm;
}

std::vector<long long> zone_pixel_counts(const ZoneMap& zm, int zone_count) {
  std::vector<long long> counts(static_cast<std::size_t>(zone_count), 0);
  for (int z : zm.zones) counts.at(static_cast<std::size_t>(z))++;
  return counts;
}

}  // namespace fovqa
