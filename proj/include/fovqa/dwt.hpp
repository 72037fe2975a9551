#pragma once

#include <vector>

#include "fovqa/image.hpp"

namespace fovqa {

// Multi-level orthonormal Haar decomposition. details[0] is the finest
// level; hl carries the horizontal high-pass (detail along x), lh the
// vertical, hh the diagonal. ll is the approximation left after the
// coarsest level.
struct HaarSubbands {
  struct Detail {
    Map hl, lh, hh;
  };
  int levels = 0;
  Map ll;
  std::vector<Detail> details;
};

// Requires both dimensions divisible by 2^levels.
HaarSubbands haar_dwt2(const Map& img, int levels);

// Exact inverse of haar_dwt2 up to floating-point round-off.
Map haar_idwt2(const HaarSubbands& sb);

// Extends right/bottom by mirror reflection (same edge rule as the
// convolution filters) until both dimensions are multiples of `multiple`.
Map reflect_pad_to_multiple(const Map& m, int multiple);

}  // namespace fovqa
