#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fovqa {

// Interleaved raster with float storage. 8/16-bit integer pixel values are
// exactly representable, so images loaded from disk round-trip losslessly.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  int bit_depth = 8;
  std::vector<float> data;  // row-major, interleaved

  Image() = default;
  Image(int w, int h, int c, int depth = 8)
      : width(w), height(h), channels(c), bit_depth(depth),
        data(static_cast<std::size_t>(w) * h * c, 0.0f) {}

  float& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double max_value() const { return static_cast<double>((1u << bit_depth) - 1u); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  bool same_dims(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

// Single-channel double raster (eccentricity maps, weight maps, luminance).
struct Map {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Map() = default;
  Map(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

struct ZoneMap {
  int width = 0;
  int height = 0;
  std::vector<int> zones;  // 0-based zone index per pixel

  ZoneMap() = default;
  ZoneMap(int w, int h) : width(w), height(h), zones(static_cast<std::size_t>(w) * h, 0) {}
  int at(int x, int y) const { return zones[static_cast<std::size_t>(y) * width + x]; }
};

// Rounds to the integer pixel grid and clamps to [0, 2^bit_depth - 1].
Image quantize(const Image& img);

// Binary PNM (P5 grayscale / P6 color), 8- or 16-bit.
Image load_pnm(const std::string& path);
void save_pnm(const Image& img, const std::string& path);

// Portable float map, single channel, little-endian, bottom-up scanlines.
Map load_pfm(const std::string& path);
void save_pfm(const Map& map, const std::string& path);

// Zone maps exported as 8-bit P5 rasters of zone indices.
void save_zone_map(const ZoneMap& zm, const std::string& path);

}  // namespace fovqa
