#pragma once

#include <utility>
#include <vector>

#include "fovqa/image.hpp"

namespace fovqa {

// Physical description of one eye's display path in an HMD. Lengths are
// millimeters throughout.
struct DisplayGeometry {
  double focal_length_mm = 62.0;
  double lens_to_display_mm = 25.0;
  double lens_to_eye_mm = 10.0;
  int viewport_width_px = 1280;
  int viewport_height_px = 1440;
  double viewport_width_mm = 0.0;
  double viewport_height_mm = 0.0;

  // Throws std::invalid_argument unless every field is strictly positive
  // and the display sits inside the focal length.
  void validate() const;
};

// Quantities of the magnified virtual viewport the lens forms. Pixel
// dimensions match the displayed viewport; physical lengths are scaled by
// the lens magnification.
struct VirtualGeometry {
  double lens_to_virtual_mm = 0.0;
  double eye_to_virtual_mm = 0.0;
  int width_px = 0;
  int height_px = 0;
  double width_mm = 0.0;
  double height_mm = 0.0;
  double magnification = 1.0;

  double pitch_x_mm() const { return width_mm / width_px; }
  double pitch_y_mm() const { return height_mm / height_px; }
};

VirtualGeometry derive_virtual_geometry(const DisplayGeometry& display);

// Pixel pitch of a square-pixel panel from its diagonal and resolution.
double square_pixel_pitch_mm(double diagonal_mm, int width_px, int height_px);

// Visual angle subtended by one virtual-viewport pixel at the eye,
// evaluated at the foveation point, per axis (degrees).
std::pair<double, double> degrees_per_pixel(const VirtualGeometry& vg);

// Eccentricity intervals [edges[k], edges[k+1]) in degrees; the last zone
// is unbounded. Zone 0 is the fovea.
struct ZoneScheme {
  std::vector<double> edges_deg{0.0, 2.5, 4.0, 9.0, 30.0};

  int zone_count() const { return static_cast<int>(edges_deg.size()); }
  void validate() const;
};

struct EccentricityMap {
  Map deg;  // per-pixel eccentricity in degrees
  double foveation_x_px = 0.0;
  double foveation_y_px = 0.0;
};

// Angular distance from the foveation point to a pixel, in degrees.
double eccentricity_at(double x_px, double y_px, double foveation_x_px, double foveation_y_px,
                       const VirtualGeometry& vg);

EccentricityMap eccentricity_map(const VirtualGeometry& vg, double foveation_x_px,
                                 double foveation_y_px);

// 0-based zone index for an eccentricity; intervals are half-open on the
// right. Throws std::domain_error for negative eccentricities.
int zone_of(double ecc_deg, const ZoneScheme& scheme);

ZoneMap zone_map(const EccentricityMap& em, const ZoneScheme& scheme);

// Per-zone pixel counts of a zone map.
std::vector<long long> zone_pixel_counts(const ZoneMap& zm, int zone_count);

}  // namespace fovqa
