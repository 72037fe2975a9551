#include "fovqa/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fovqa/util.hpp"

namespace fovqa {

namespace {

// Skips whitespace and '#' comment lines inside a PNM header.
int next_header_int(std::istream& in, const std::string& path) {
  while (true) {
    int c = in.peek();
    if (c == EOF) throw std::runtime_error("truncated PNM header: " + path);
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
  }
  int value = 0;
  in >> value;
  if (!in) throw std::runtime_error("malformed PNM header: " + path);
  return value;
}

}  // namespace

Image quantize(const Image& img) {
  Image out = img;
  const double max = img.max_value();
  for (auto& v : out.data) {
    double r = std::nearbyint(static_cast<double>(v));
    v = static_cast<float>(std::clamp(r, 0.0, max));
  }
  return out;
}

Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw std::runtime_error("unsupported image format (want binary PGM/PPM): " + path);
  const int channels = magic[1] == '5' ? 1 : 3;
  const int width = next_header_int(in, path);
  const int height = next_header_int(in, path);
  const int maxval = next_header_int(in, path);
  if (width <= 0 || height <= 0) throw std::runtime_error("bad PNM dimensions: " + path);
  if (maxval != 255 && maxval != 65535)
    throw std::runtime_error("unsupported PNM maxval (want 255 or 65535): " + path);
  in.get();  // single whitespace after maxval

  Image img(width, height, channels, maxval == 255 ? 8 : 16);
  const std::size_t n = img.data.size();
  if (maxval == 255) {
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("truncated PNM data: " + path);
    for (std::size_t i = 0; i < n; ++i) img.data[i] = raw[i];
  } else {
    std::vector<unsigned char> raw(n * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 2));
    if (!in) throw std::runtime_error("truncated PNM data: " + path);
    for (std::size_t i = 0; i < n; ++i)
      img.data[i] = static_cast<float>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return img;
}

void save_pnm(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("save_pnm: images must have 1 or 3 channels");
  if (img.bit_depth != 8 && img.bit_depth != 16)
    throw std::invalid_argument("save_pnm: bit depth must be 8 or 16");
  const Image q = quantize(img);
  const int maxval = img.bit_depth == 8 ? 255 : 65535;
  std::string out;
  out += img.channels == 1 ? "P5\n" : "P6\n";
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n";
  out += std::to_string(maxval) + "\n";
  const std::size_t n = q.data.size();
  if (maxval == 255) {
    out.reserve(out.size() + n);
    for (float v : q.data) out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  } else {
    out.reserve(out.size() + n * 2);
    for (float v : q.data) {
      auto word = static_cast<unsigned>(v);
      out.push_back(static_cast<char>((word >> 8) & 0xff));
      out.push_back(static_cast<char>(word & 0xff));
    }
  }
  atomic_write_file(path, out);
}

Map load_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map: " + path);
  std::string magic;
  in >> magic;
  if (magic != "Pf") throw std::runtime_error("unsupported PFM format (want grayscale Pf): " + path);
  int width = 0, height = 0;
  double scale = 0;
  in >> width >> height >> scale;
  if (!in || width <= 0 || height <= 0) throw std::runtime_error("bad PFM header: " + path);
  if (scale >= 0) throw std::runtime_error("big-endian PFM not supported: " + path);
  in.get();
  Map map(width, height);
  std::vector<float> row(static_cast<std::size_t>(width));
  for (int y = height - 1; y >= 0; --y) {  // PFM scanlines run bottom-up
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(width * sizeof(float)));
    if (!in) throw std::runtime_error("truncated PFM data: " + path);
    for (int x = 0; x < width; ++x) map.at(x, y) = row[x];
  }
  return map;
}

void save_pfm(const Map& map, const std::string& path) {
  std::string out = "Pf\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n-1.0\n";
  out.reserve(out.size() + map.data.size() * sizeof(float));
  for (int y = map.height - 1; y >= 0; --y) {
    for (int x = 0; x < map.width; ++x) {
      float v = static_cast<float>(map.at(x, y));
      char bytes[sizeof(float)];
      std::memcpy(bytes, &v, sizeof(float));
      out.append(bytes, sizeof(float));
    }
  }
  atomic_write_file(path, out);
}

void save_zone_map(const ZoneMap& zm, const std::string& path) {
  Image img(zm.width, zm.height, 1, 8);
  for (std::size_t i = 0; i < zm.zones.size(); ++i) {
    if (zm.zones[i] < 0 || zm.zones[i] > 255)
      throw std::invalid_argument("zone index out of 8-bit range");
    img.data[i] = static_cast<float>(zm.zones[i]);
  }
  save_pnm(img, path);
}

}  // namespace fovqa
