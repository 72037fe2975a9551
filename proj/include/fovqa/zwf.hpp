#pragma once

#include <vector>

#include "fovqa/image.hpp"

namespace fovqa {

// Per-zone MSE of the luminance plane. A zone with no pixels is absent: its
// mse slot is 0 and must not receive weight when scoring.
struct ZoneMseVector {
  std::vector<double> mse;
  std::vector<long long> pixel_count;

  int zone_count() const { return static_cast<int>(mse.size()); }
  bool present(int k) const { return pixel_count[static_cast<std::size_t>(k)] > 0; }
};

// Simplex-constrained zone weights: each nonnegative, summing to 1 within
// 1e-9.
struct ZoneWeights {
  std::vector<double> w;

  int zone_count() const { return static_cast<int>(w.size()); }
  void validate() const;
};

ZoneMseVector zone_mse(const Image& ref, const Image& dist, const ZoneMap& zm);

// 10*log10(max^2 / sum(w_k * mse_k)). Zero weighted error -> +inf.
double zwf_score(const ZoneMseVector& zm, const ZoneWeights& weights, double max_value = 255.0);

}  // namespace fovqa
