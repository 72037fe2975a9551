#include "fovqa/dwt.hpp"

#include <cmath>
#include <stdexcept>

namespace fovqa {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

inline int mirror(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

// One orthonormal level: w x h (both even) -> four (w/2) x (h/2) subbands.
void haar_level(const Map& in, Map& ll, Map& hl, Map& lh, Map& hh) {
  const int w = in.width, h = in.height;
  const int hw = w / 2, hh_ = h / 2;
  Map lo(hw, h), hi(hw, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < hw; ++x) {
      const double a = in.at(2 * x, y), b = in.at(2 * x + 1, y);
      lo.at(x, y) = (a + b) * kInvSqrt2;
      hi.at(x, y) = (a - b) * kInvSqrt2;
    }
  }
  ll = Map(hw, hh_);
  hl = Map(hw, hh_);
  lh = Map(hw, hh_);
  hh = Map(hw, hh_);
  for (int y = 0; y < hh_; ++y) {
    for (int x = 0; x < hw; ++x) {
      const double la = lo.at(x, 2 * y), lb = lo.at(x, 2 * y + 1);
      const double ha = hi.at(x, 2 * y), hb = hi.at(x, 2 * y + 1);
      ll.at(x, y) = (la + lb) * kInvSqrt2;
      lh.at(x, y) = (la - lb) * kInvSqrt2;
      hl.at(x, y) = (ha + hb) * kInvSqrt2;
      hh.at(x, y) = (ha - hb) * kInvSqrt2;
    }
  }
}

}  // namespace

HaarSubbands haar_dwt2(const Map& img, int levels) {
  if (levels < 1) throw std::invalid_argument("haar_dwt2: levels must be >= 1");
  const int div = 1 << levels;
  if (img.width % div != 0 || img.height % div != 0)
    throw std::invalid_argument("haar_dwt2: dimensions must be divisible by 2^levels");

  HaarSubbands sb;
  sb.levels = levels;
  Map approx = img;
  for (int l = 0; l < levels; ++l) {
    HaarSubbands::Detail d;
    Map next;
    haar_level(approx, next, d.hl, d.lh, d.hh);
    sb.details.push_back(std::move(d));
    approx = std::move(next);
  }
  sb.ll = std::move(approx);
  return sb;
}

Map haar_idwt2(const HaarSubbands& sb) {
  Map approx = sb.ll;
  for (int l = sb.levels - 1; l >= 0; --l) {
    const auto& d = sb.details[static_cast<std::size_t>(l)];
    const int hw = approx.width, hh_ = approx.height;
    Map lo(hw, 2 * hh_), hi(hw, 2 * hh_);
    for (int y = 0; y < hh_; ++y) {
      for (int x = 0; x < hw; ++x) {
        lo.at(x, 2 * y) = (approx.at(x, y) + d.lh.at(x, y)) * kInvSqrt2;
        lo.at(x, 2 * y + 1) = (approx.at(x, y) - d.lh.at(x, y)) * kInvSqrt2;
        hi.at(x, 2 * y) = (d.hl.at(x, y) + d.hh.at(x, y)) * kInvSqrt2;
        hi.at(x, 2 * y + 1) = (d.hl.at(x, y) - d.hh.at(x, y)) * kInvSqrt2;
      }
    }
    Map out(2 * hw, 2 * hh_);
    for (int y = 0; y < 2 * hh_; ++y) {
      for (int x = 0; x < hw; ++x) {
        out.at(2 * x, y) = (lo.at(x, y) + hi.at(x, y)) * kInvSqrt2;
        out.at(2 * x + 1, y) = (lo.at(x, y) - hi.at(x, y)) * kInvSqrt2;
      }
    }
    approx = std::move(out);
  }
  return approx;
}

Map reflect_pad_to_multiple(const Map& m, int multiple) {
  if (multiple < 1) throw std::invalid_argument("reflect_pad_to_multiple: bad multiple");
  const int w = ((m.width + multiple - 1) / multiple) * multiple;
  const int h = ((m.height + multiple - 1) / multiple) * multiple;
  if (w == m.width && h == m.height) return m;
  Map out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(x, y) = m.at(mirror(x, m.width), mirror(y, m.height));
  return out;
}

}  // namespace fovqa
