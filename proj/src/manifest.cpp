#include "fovqa/manifest.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "fovqa/util.hpp"

namespace fovqa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("manifest: " + path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double positive_at(const json& j, const std::string& path) {
  const double v = number_at(j, path);
  if (!(v > 0)) fail(path, "must be positive");
  return v;
}

int positive_int_at(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v <= 0) fail(path, "must be positive");
  return static_cast<int>(v);
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

// Ids flow into file names and CSV cells unquoted.
void check_id(const std::string& id, const std::string& path) {
  if (id.empty()) fail(path, "must not be empty");
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      fail(path, "id '" + id + "' may use only letters, digits, '_', '-', '.'");
}

void parse_geometry(const json& g, Manifest& m) {
  m.display.focal_length_mm = positive_at(require(g, "focal_length_mm", "geometry"),
                                          "geometry.focal_length_mm");
  m.display.lens_to_display_mm = positive_at(require(g, "lens_to_display_mm", "geometry"),
                                             "geometry.lens_to_display_mm");
  m.display.lens_to_eye_mm = positive_at(require(g, "lens_to_eye_mm", "geometry"),
                                         "geometry.lens_to_eye_mm");
  m.display.viewport_width_px = positive_int_at(require(g, "viewport_width_px", "geometry"),
                                                "geometry.viewport_width_px");
  m.display.viewport_height_px = positive_int_at(require(g, "viewport_height_px", "geometry"),
                                                 "geometry.viewport_height_px");

  const bool has_pitch = g.contains("pixel_pitch_mm");
  const bool has_size = g.contains("viewport_width_mm") || g.contains("viewport_height_mm");
  if (has_pitch && has_size)
    fail("geometry", "give either pixel_pitch_mm or viewport_{width,height}_mm, not both");
  if (has_pitch) {
    const double pitch = positive_at(g.at("pixel_pitch_mm"), "geometry.pixel_pitch_mm");
    m.display.viewport_width_mm = pitch * m.display.viewport_width_px;
    m.display.viewport_height_mm = pitch * m.display.viewport_height_px;
  } else if (has_size) {
    m.display.viewport_width_mm = positive_at(require(g, "viewport_width_mm", "geometry"),
                                              "geometry.viewport_width_mm");
    m.display.viewport_height_mm = positive_at(require(g, "viewport_height_mm", "geometry"),
                                               "geometry.viewport_height_mm");
  } else {
    fail("geometry", "missing pixel_pitch_mm (or viewport_{width,height}_mm)");
  }

  if (g.contains("fov_h_deg")) m.fov_h_deg = positive_at(g.at("fov_h_deg"), "geometry.fov_h_deg");
  if (g.contains("fov_v_deg")) m.fov_v_deg = positive_at(g.at("fov_v_deg"), "geometry.fov_v_deg");
  if (m.fov_h_deg >= 180) fail("geometry.fov_h_deg", "must be below 180");
  if (m.fov_v_deg >= 180) fail("geometry.fov_v_deg", "must be below 180");

  try {
    m.display.validate();
  } catch (const std::exception& e) {
    fail("geometry", e.what());
  }
}

std::vector<double> sigma_grid(const json& arr, const std::string& path) {
  if (!arr.is_array() || arr.empty()) fail(path, "expected a non-empty array");
  std::vector<double> out;
  std::set<double> seen;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const double v = positive_at(arr.at(i), p);
    if (!seen.insert(v).second) fail(p, "duplicate sigma would collide on stimulus ids");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int Manifest::planned_stimuli() const {
  int total = 0;
  for (const auto& pid : pattern_ids) {
    const auto it = sigmas.find(quality_pattern(pid).scenario);
    total += it == sigmas.end() ? 0 : static_cast<int>(it->second.size());
  }
  return total * static_cast<int>(sources.size());
}

ViewportSpec Manifest::viewport_spec(const ManifestSource& src) const {
  ViewportSpec spec;
  spec.yaw_deg = src.yaw_deg;
  spec.pitch_deg = src.pitch_deg;
  spec.fov_h_deg = fov_h_deg;
  spec.fov_v_deg = fov_v_deg;
  spec.out_width = display.viewport_width_px;
  spec.out_height = display.viewport_height_px;
  return spec;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("manifest: cannot open " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw ValidationError("manifest: " + path + " is not valid JSON: " + e.what());
  }
  if (!root.is_object()) throw ValidationError("manifest: top level must be an object");

  Manifest m;
  parse_geometry(require(root, "geometry", ""), m);

  if (root.contains("zones")) {
    const json& z = require(root.at("zones"), "edges_deg", "zones");
    if (!z.is_array() || z.size() < 1) fail("zones.edges_deg", "expected a non-empty array");
    m.zones.edges_deg.clear();
    for (std::size_t i = 0; i < z.size(); ++i)
      m.zones.edges_deg.push_back(
          number_at(z.at(i), "zones.edges_deg[" + std::to_string(i) + "]"));
  }
  try {
    m.zones.validate();
  } catch (const std::exception& e) {
    fail("zones.edges_deg", e.what());
  }

  if (root.contains("belt_width_deg")) {
    m.belt_width_deg = number_at(root.at("belt_width_deg"), "belt_width_deg");
    if (m.belt_width_deg < 0) fail("belt_width_deg", "must be nonnegative");
  }
  if (root.contains("kernel_extent"))
    m.kernel_extent = positive_int_at(root.at("kernel_extent"), "kernel_extent");
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0)
      fail("seed", "expected a nonnegative integer");
    m.seed = s.get<std::uint64_t>();
  }

  const fs::path base = fs::path(path).parent_path();

  const json& sources = require(root, "sources", "");
  if (!sources.is_array() || sources.empty()) fail("sources", "expected a non-empty array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const std::string p = "sources[" + std::to_string(i) + "]";
    const json& s = sources.at(i);
    ManifestSource src;
    src.id = string_at(require(s, "id", p), p + ".id");
    check_id(src.id, p + ".id");
    if (!ids.insert(src.id).second) fail(p + ".id", "duplicate source id '" + src.id + "'");
    src.path = (base / string_at(require(s, "path", p), p + ".path")).string();
    if (!fs::exists(src.path)) fail(p + ".path", "file not found: " + src.path);
    if (s.contains("yaw_deg")) src.yaw_deg = number_at(s.at("yaw_deg"), p + ".yaw_deg");
    if (s.contains("pitch_deg")) {
      src.pitch_deg = number_at(s.at("pitch_deg"), p + ".pitch_deg");
      if (src.pitch_deg < -90 || src.pitch_deg > 90) fail(p + ".pitch_deg", "must be in [-90, 90]");
    }
    m.sources.push_back(std::move(src));
  }

  if (root.contains("patterns")) {
    const json& pats = root.at("patterns");
    if (!pats.is_array() || pats.empty()) fail("patterns", "expected a non-empty array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < pats.size(); ++i) {
      const std::string p = "patterns[" + std::to_string(i) + "]";
      const std::string id = string_at(pats.at(i), p);
      try {
        quality_pattern(id);
      } catch (const std::exception& e) {
        fail(p, e.what());
      }
      if (!seen.insert(id).second) fail(p, "duplicate pattern '" + id + "'");
      m.pattern_ids.push_back(id);
    }
  } else {
    for (const auto& pat : standard_patterns()) m.pattern_ids.push_back(pat.id);
  }

  if (root.contains("sigmas")) {
    const json& sig = root.at("sigmas");
    if (!sig.is_object()) fail("sigmas", "expected an object keyed by scenario");
    for (const auto& [key, value] : sig.items()) {
      Scenario sc;
      try {
        sc = scenario_from_string(key);
      } catch (const std::exception& e) {
        fail("sigmas." + key, e.what());
      }
      m.sigmas[sc] = sigma_grid(value, "sigmas." + key);
    }
  } else {
    m.sigmas[Scenario::S1] = {2, 4, 8, 12};
    m.sigmas[Scenario::S2] = {1, 2, 4, 6};
  }
  for (const auto& pid : m.pattern_ids) {
    const Scenario sc = quality_pattern(pid).scenario;
    if (m.sigmas.find(sc) == m.sigmas.end())
      fail("sigmas", "pattern " + pid + " needs a sigma grid for scenario " + to_string(sc));
  }

  if (root.contains("out_dir")) m.out_dir = string_at(root.at("out_dir"), "out_dir");
  if (m.out_dir.empty()) fail("out_dir", "must not be empty");

  if (root.contains("mos_csv")) {
    m.mos_csv = (base / string_at(root.at("mos_csv"), "mos_csv")).string();
    if (!fs::exists(m.mos_csv)) fail("mos_csv", "file not found: " + m.mos_csv);
  }

  // Zones must reach the whole raster: the blend machinery assumes one flag
  // per zone, so pattern length is pinned to the scheme.
  for (const auto& pid : m.pattern_ids)
    if (static_cast<int>(quality_pattern(pid).hq.size()) != m.zones.zone_count())
      fail("zones.edges_deg", "pattern " + pid + " assumes " +
                                  std::to_string(quality_pattern(pid).hq.size()) + " zones");

  return m;
}

}  // namespace fovqa
