#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fovqa/geometry.hpp"
#include "fovqa/projection.hpp"
#include "fovqa/stimulus.hpp"

namespace fovqa {

struct ManifestSource {
  std::string id;
  std::string path;  // equirectangular panorama, resolved against the manifest
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
};

// Parsed and fully validated run description. Source and MOS paths are
// stored resolved; out_dir stays as written (command-line and environment
// overrides take precedence anyway).
struct Manifest {
  DisplayGeometry display;
  double fov_h_deg = 96.0;
  double fov_v_deg = 0.0;  // 0 = derive from the raster aspect
  ZoneScheme zones;
  double belt_width_deg = 5.0;
  int kernel_extent = 50;
  std::vector<ManifestSource> sources;
  std::vector<std::string> pattern_ids;
  std::map<Scenario, std::vector<double>> sigmas;
  std::string out_dir = "out";
  std::string mos_csv;  // optional; required by fit-weights/evaluate/report
  std::uint64_t seed = 0;

  int planned_stimuli() const;
  ViewportSpec viewport_spec(const ManifestSource& src) const;
};

// Schema violations, duplicate ids, and missing referenced files all raise
// ValidationError with the offending field path in the message.
Manifest load_manifest(const std::string& path);

}  // namespace fovqa
