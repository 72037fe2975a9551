#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "fovqa/dwt.hpp"

using namespace fovqa;

namespace {

Map random_map(int w, int h, std::uint32_t seed) {
  Map m(w, h);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  for (auto& v : m.data) v = dist(rng);
  return m;
}

double energy(const Map& m) {
  double e = 0.0;
  for (const double v : m.data) e += v * v;
  return e;
}

}  // namespace

TEST_SUITE_BEGIN("dwt");

TEST_CASE("single-level coefficients on a 2x2 block") {
  Map m(2, 2);
  const double a = 9.0, b = 3.0, c = 5.0, d = 1.0;
  m.at(0, 0) = a;
  m.at(1, 0) = b;
  m.at(0, 1) = c;
  m.at(1, 1) = d;

  const HaarSubbands sb = haar_dwt2(m, 1);
  REQUIRE(sb.levels == 1);
  REQUIRE(sb.ll.width == 1);
  CHECK(sb.ll.at(0, 0) == doctest::Approx((a + b + c + d) / 2.0));
  CHECK(sb.details[0].hl.at(0, 0) == doctest::Approx((a - b + c - d) / 2.0));
  CHECK(sb.details[0].lh.at(0, 0) == doctest::Approx((a + b - c - d) / 2.0));
  CHECK(sb.details[0].hh.at(0, 0) == doctest::Approx((a - b - c + d) / 2.0));
}

TEST_CASE("the transform is orthonormal: coefficient energy equals image energy") {
  const Map m = random_map(32, 48, 11);
  const HaarSubbands sb = haar_dwt2(m, 4);

  double coeff_energy = energy(sb.ll);
  for (const auto& d : sb.details)
    coeff_energy += energy(d.hl) + energy(d.lh) + energy(d.hh);
  CHECK(coeff_energy == doctest::Approx(energy(m)).epsilon(1e-12));
}

TEST_CASE("subband shapes halve per level") {
  const HaarSubbands sb = haar_dwt2(random_map(64, 32, 3), 3);
  REQUIRE(sb.details.size() == 3);
  CHECK(sb.details[0].hl.width == 32);
  CHECK(sb.details[0].hl.height == 16);
  CHECK(sb.details[2].hh.width == 8);
  CHECK(sb.details[2].hh.height == 4);
  CHECK(sb.ll.width == 8);
  CHECK(sb.ll.height == 4);
}

TEST_CASE("reconstruction inverts the transform") {
  const Map m = random_map(48, 16, 7);
  const Map back = haar_idwt2(haar_dwt2(m, 4));
  REQUIRE(back.width == m.width);
  REQUIRE(back.height == m.height);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    CHECK(back.data[i] == doctest::Approx(m.data[i]).epsilon(1e-12));
}

TEST_CASE("a constant image concentrates all energy in the approximation") {
  Map m(16, 16, 5.0);
  const HaarSubbands sb = haar_dwt2(m, 4);
  for (const auto& d : sb.details) {
    CHECK(energy(d.hl) == doctest::Approx(0.0));
    CHECK(energy(d.lh) == doctest::Approx(0.0));
    CHECK(energy(d.hh) == doctest::Approx(0.0));
  }
  // 4 levels on 16x16 leave a single coefficient holding everything.
  CHECK(sb.ll.width == 1);
  CHECK(sb.ll.at(0, 0) == doctest::Approx(5.0 * 16.0));  // 5 * sqrt(256)
}

TEST_CASE("dimension requirements") {
  CHECK_THROWS_AS(haar_dwt2(Map(20, 16), 3), std::invalid_argument);  // 20 % 8 != 0
  CHECK_THROWS_AS(haar_dwt2(Map(16, 16), 0), std::invalid_argument);
}

TEST_CASE("reflect padding mirrors the filter edge rule") {
  Map m(3, 2);
  // 1 2 3
  // 4 5 6
  for (int i = 0; i < 6; ++i) m.data[static_cast<std::size_t>(i)] = i + 1;

  const Map p = reflect_pad_to_multiple(m, 4);
  REQUIRE(p.width == 4);
  REQUIRE(p.height == 4);
  // Mirrored column: index 3 -> 2*3-1-3 = 2.
  CHECK(p.at(3, 0) == 3.0);
  CHECK(p.at(3, 1) == 6.0);
  // Mirrored rows: index 2 -> 1, index 3 -> 0.
  CHECK(p.at(0, 2) == 4.0);
  CHECK(p.at(0, 3) == 1.0);
  CHECK(p.at(3, 3) == 3.0);

  // Already aligned: untouched.
  const Map same = reflect_pad_to_multiple(Map(8, 4, 2.0), 4);
  CHECK(same.width == 8);
  CHECK(same.height == 4);
}

TEST_SUITE_END();
