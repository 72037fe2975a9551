#include "fovqa/zwf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fovqa/metrics.hpp"

namespace fovqa {

void ZoneWeights::validate() const {
  double sum = 0.0;
  for (double v : w) {
    if (v < 0) throw std::invalid_argument("zone weights must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("zone weights must sum to 1 (got " + std::to_string(sum) + ")");
}

ZoneMseVector zone_mse(const Image& ref, const Image& dist, const ZoneMap& zm) {
  if (!ref.same_dims(dist)) throw std::invalid_argument("zone_mse: dimension mismatch");
  if (ref.width != zm.width || ref.height != zm.height)
    throw std::invalid_argument("zone_mse: zone map does not match image dimensions");

  int zones = 0;
  for (int z : zm.zones) zones = std::max(zones, z + 1);

  const Map a = luminance(ref), b = luminance(dist);
  ZoneMseVector out;
  out.mse.assign(static_cast<std::size_t>(zones), 0.0);
  out.pixel_count.assign(static_cast<std::size_t>(zones), 0);
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    const auto z = static_cast<std::size_t>(zm.zones[i]);
    out.mse[z] += d * d;
    out.pixel_count[z] += 1;
  }
  for (std::size_t z = 0; z < out.mse.size(); ++z)
    if (out.pixel_count[z] > 0) out.mse[z] /= static_cast<double>(out.pixel_count[z]);
  return out;
}

double zwf_score(const ZoneMseVector& zm, const ZoneWeights& weights, double max_value) {
  weights.validate();
  if (weights.zone_count() != zm.zone_count())
    throw std::invalid_argument("zwf_score: weight and zone counts differ");
  if (max_value <= 0) throw std::invalid_argument("zwf_score: max_value must be positive");

  bool any_present = false;
  double acc = 0.0;
  for (int k = 0; k < zm.zone_count(); ++k) {
    const double w = weights.w[static_cast<std::size_t>(k)];
    if (!zm.present(k)) {
      if (w > 0)
        throw std::invalid_argument("zwf_score: zone " + std::to_string(k + 1) +
                                    " has no pixels but carries positive weight");
      continue;
    }
    any_present = true;
    acc += w * zm.mse[static_cast<std::size_t>(k)];
  }
  if (!any_present) throw std::invalid_argument("zwf_score: no zone is present");
  if (acc == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / acc);
}

}  // namespace fovqa
