#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "fovqa/geometry.hpp"
#include "fovqa/image.hpp"

namespace fovqa::test {

// 1280x1440 @ 0.04375 mm display scaled down by an integer factor with the
// physical extent kept, so eccentricities and zone layout stay comparable.
inline DisplayGeometry test_display(int scale = 4) {
  DisplayGeometry d;
  d.viewport_width_px = 1280 / scale;
  d.viewport_height_px = 1440 / scale;
  d.viewport_width_mm = 1280 * 0.04375;
  d.viewport_height_mm = 1440 * 0.04375;
  return d;
}

inline std::pair<double, double> raster_center(const DisplayGeometry& d) {
  return {(d.viewport_width_px - 1) / 2.0, (d.viewport_height_px - 1) / 2.0};
}

inline Image noise_image(int w, int h, int channels, std::uint32_t seed) {
  Image img(w, h, channels);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  for (auto& v : img.data) v = static_cast<float>(dist(rng));
  return img;
}

// Smooth deterministic texture; wraps cleanly in x (integer cycle counts).
inline Image smooth_image(int w, int h, int channels, int cycles_x = 3, int cycles_y = 2) {
  Image img(w, h, channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        const double phase = 0.6 * c;
        const double v = 127.5 + 60.0 * std::sin(2.0 * std::numbers::pi * cycles_x * x / w + phase) +
                         50.0 * std::cos(std::numbers::pi * cycles_y * y / (h - 1.0));
        img.at(x, y, c) = static_cast<float>(v);
      }
  return img;
}

class TempDir {
public:
  TempDir() {
    const auto base = std::filesystem::temp_directory_path();
    std::mt19937_64 rng(std::random_device{}());
    path_ = base / ("fovqa_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str(const std::string& rel = "") const { return (path_ / rel).string(); }

private:
  std::filesystem::path path_;
};

}  // namespace fovqa::test
