#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fovqa/image.hpp"
#include "fovqa/projection.hpp"
#include "helpers.hpp"

using namespace fovqa;

namespace {

constexpr double kD2R = std::numbers::pi / 180.0;

// Brute-force reference: per pixel, build the ray from an explicit camera
// basis (forward/right/up from yaw/pitch), intersect the unit sphere, and
// sample with a separately written wrap/clamp bilinear.
double oracle_wrap_sample(const Image& img, double x, double y, int c) {
  const auto pix = [&](int xi, int yi) {
    xi %= img.width;
    if (xi < 0) xi += img.width;
    yi = std::max(0, std::min(yi, img.height - 1));
    return static_cast<double>(img.at(xi, yi, c));
  };
  const double xf = std::floor(x);
  const double yc = std::min(std::max(y, 0.0), static_cast<double>(img.height - 1));
  const double yf = std::floor(yc);
  const double tx = x - xf, ty = yc - yf;
  const int xi = static_cast<int>(xf), yi = static_cast<int>(yf);
  return (1 - tx) * (1 - ty) * pix(xi, yi) + tx * (1 - ty) * pix(xi + 1, yi) +
         (1 - tx) * ty * pix(xi, yi + 1) + tx * ty * pix(xi + 1, yi + 1);
}

Image oracle_extract(const Image& equirect, const ViewportSpec& spec) {
  const double yaw = spec.yaw_deg * kD2R, pitch = spec.pitch_deg * kD2R;
  const double fwd[3] = {std::sin(yaw) * std::cos(pitch), std::sin(pitch),
                         std::cos(yaw) * std::cos(pitch)};
  const double right[3] = {std::cos(yaw), 0.0, -std::sin(yaw)};
  const double up[3] = {-std::sin(yaw) * std::sin(pitch), std::cos(pitch),
                        -std::cos(yaw) * std::sin(pitch)};
  const double ha = std::tan(0.5 * spec.fov_h_deg * kD2R);
  const double va = std::tan(0.5 * spec.effective_fov_v() * kD2R);

  Image out(spec.out_width, spec.out_height, equirect.channels, equirect.bit_depth);
  for (int v = 0; v < spec.out_height; ++v) {
    for (int u = 0; u < spec.out_width; ++u) {
      const double a = ha * (2.0 * (u + 0.5) / spec.out_width - 1.0);
      const double b = va * (1.0 - 2.0 * (v + 0.5) / spec.out_height);
      double d[3];
      for (int i = 0; i < 3; ++i) d[i] = fwd[i] + a * right[i] + b * up[i];
      const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
      const double lon = std::atan2(d[0], d[2]) / kD2R;
      const double lat = std::asin(d[1] / n) / kD2R;
      const double ex = (lon / 360.0 + 0.5) * equirect.width;
      const double ey = (0.5 - lat / 180.0) * equirect.height;
      for (int c = 0; c < equirect.channels; ++c)
        out.at(u, v, c) = static_cast<float>(oracle_wrap_sample(equirect, ex, ey, c));
    }
  }
  return out;
}

int max_quantized_deviation(const Image& a, const Image& b) {
  const Image qa = quantize(a), qb = quantize(b);
  int worst = 0;
  for (std::size_t i = 0; i < qa.data.size(); ++i)
    worst = std::max(worst, static_cast<int>(std::lround(
                                std::abs(qa.data[i] - qb.data[i]))));
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("projection");

TEST_CASE("equirect validation enforces the 2:1 full-sphere shape") {
  CHECK_NOTHROW(validate_equirect(Image(64, 32, 1)));
  CHECK_THROWS_AS(validate_equirect(Image(64, 33, 1)), std::invalid_argument);
  CHECK_THROWS_AS(validate_equirect(Image(64, 32, 2)), std::invalid_argument);
}

TEST_CASE("viewport spec validation") {
  ViewportSpec s;
  s.out_width = 64;
  s.out_height = 64;
  CHECK_NOTHROW(s.validate());
  CHECK(ViewportSpec{0, 0, 96, 0, 1280, 1440}.effective_fov_v() == doctest::Approx(108.0));

  s.fov_h_deg = 180.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.fov_h_deg = 96.0;
  s.pitch_deg = 91.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.pitch_deg = 0.0;
  s.out_width = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("bilinear sampling wraps longitude and clamps latitude") {
  Image img(8, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) img.at(x, y) = static_cast<float>(10 * x + y);

  // Halfway between the last and first column.
  CHECK(bilinear_sample(img, 7.5, 1.0, 0) == doctest::Approx(0.5 * 71 + 0.5 * 1));
  CHECK(bilinear_sample(img, -0.5, 1.0, 0) == doctest::Approx(0.5 * 71 + 0.5 * 1));
  // Above the top row: clamped.
  CHECK(bilinear_sample(img, 2.0, -3.0, 0) == doctest::Approx(20.0));
  CHECK(bilinear_sample(img, 2.0, 9.0, 0) == doctest::Approx(23.0));
}

TEST_CASE("the optical axis lands on the viewing direction") {
  Image equi(256, 128, 1);
  for (int y = 0; y < 128; ++y)
    for (int x = 0; x < 256; ++x) equi.at(x, y) = static_cast<float>(y);

  ViewportSpec spec{30.0, 20.0, 96.0, 0.0, 9, 9};
  const auto [ex, ey] = viewport_ray_to_equirect(4.0, 4.0, spec, 256, 128);
  // lat 20 deg -> ey = (0.5 - 20/180)*128
  CHECK(ey == doctest::Approx((0.5 - 20.0 / 180.0) * 128).epsilon(1e-9));
  CHECK(ex == doctest::Approx((30.0 / 360.0 + 0.5) * 256).epsilon(1e-9));
}

TEST_CASE("constant panoramas extract to constant viewports") {
  Image equi(128, 64, 3);
  for (auto& v : equi.data) v = 77.0f;
  const Image vp = extract_viewport(equi, ViewportSpec{123.0, -45.0, 96.0, 0.0, 40, 45});
  for (const float v : vp.data) CHECK(v == doctest::Approx(77.0));
}

TEST_CASE("extraction matches the brute-force ray oracle") {
  const Image chart = test::smooth_image(512, 256, 1);
  for (const double yaw : {0.0, -137.0, 180.0 - 1e-9}) {
    for (const double pitch : {0.0, 31.0, -62.0}) {
      ViewportSpec spec{yaw, pitch, 96.0, 0.0, 160, 180};
      const Image got = extract_viewport(chart, spec);
      const Image want = oracle_extract(chart, spec);
      REQUIRE(got.same_dims(want));
      CHECK(max_quantized_deviation(got, want) <= 1);
    }
  }
}

TEST_CASE("seam-straddling viewports sample across the wrap cleanly") {
  // Color chart that is continuous across the seam by construction.
  const Image chart = test::smooth_image(512, 256, 3);
  ViewportSpec spec{179.5, 5.0, 96.0, 0.0, 128, 144};
  const Image got = extract_viewport(chart, spec);
  const Image want = oracle_extract(chart, spec);
  CHECK(max_quantized_deviation(got, want) <= 1);

  // The viewport spans the seam: its left edge still looks east (x past the
  // chart midline), its right edge wraps beyond +180 onto the western half.
  const auto [lx, ly] = viewport_ray_to_equirect(0, 72, spec, 512, 256);
  const auto [rx, ry] = viewport_ray_to_equirect(127, 72, spec, 512, 256);
  CHECK(lx > 256);
  CHECK(rx < 256);
  (void)ly;
  (void)ry;
}

TEST_CASE("polar viewports stay finite") {
  const Image chart = test::smooth_image(256, 128, 1);
  const Image vp = extract_viewport(chart, ViewportSpec{0.0, 90.0, 96.0, 0.0, 64, 64});
  for (const float v : vp.data) CHECK(std::isfinite(v));
}

TEST_SUITE_END();
