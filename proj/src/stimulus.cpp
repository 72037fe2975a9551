#include "fovqa/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "fovqa/util.hpp"

namespace fovqa {

std::string to_string(Scenario s) { return s == Scenario::S1 ? "S1" : "S2"; }

Scenario scenario_from_string(const std::string& s) {
  if (s == "S1") return Scenario::S1;
  if (s == "S2") return Scenario::S2;
  throw std::invalid_argument("unknown scenario: " + s);
}

const std::vector<QualityPattern>& standard_patterns() {
  static const std::vector<QualityPattern> patterns = [] {
    std::vector<QualityPattern> p;
    for (int n = 1; n <= 4; ++n) {  // P1..P4: HQ prefix of length n
      QualityPattern q;
      q.id = "P" + std::to_string(n);
      q.scenario = Scenario::S1;
      q.hq.assign(5, false);
      for (int k = 0; k < n; ++k) q.hq[k] = true;
      p.push_back(std::move(q));
    }
    for (int n = 4; n >= 1; --n) {  // P5..P8: HQ suffix of length n
      QualityPattern q;
      q.id = "P" + std::to_string(9 - n);
      q.scenario = Scenario::S2;
      q.hq.assign(5, false);
      for (int k = 5 - n; k < 5; ++k) q.hq[k] = true;
      p.push_back(std::move(q));
    }
    return p;
  }();
  return patterns;
}

QualityPattern quality_pattern(const std::string& id) {
  for (const auto& p : standard_patterns())
    if (p.id == id) return p;
  throw std::invalid_argument("unknown quality pattern: " + id);
}

std::vector<double> gaussian_kernel(double sigma, int kernel_extent) {
  if (sigma <= 0) throw std::domain_error("gaussian kernel: sigma must be positive");
  if (kernel_extent < 1) throw std::domain_error("gaussian kernel: extent must be positive");
  const int taps = kernel_extent % 2 == 1 ? kernel_extent : kernel_extent + 1;
  const int radius = taps / 2;
  std::vector<double> k(static_cast<std::size_t>(taps));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

namespace {

// Mirror indexing: -1 -> 0, -2 -> 1, n -> n-1, ...
inline int mirror(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace

Image gaussian_blur(const Image& img, double sigma, int kernel_extent) {
  const auto kernel = gaussian_kernel(sigma, kernel_extent);
  const int radius = static_cast<int>(kernel.size()) / 2;
  const int w = img.width, h = img.height, ch = img.channels;

  // Horizontal pass into a double buffer, then vertical pass; single cast
  // back to float at the end.
  std::vector<double> tmp(img.data.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          const int xs = mirror(x + t, w);
          acc += kernel[static_cast<std::size_t>(t + radius)] * img.at(xs, y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * ch + c] = acc;
      }
    }
  }
  Image out(w, h, ch, img.bit_depth);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          const int ys = mirror(y + t, h);
          acc += kernel[static_cast<std::size_t>(t + radius)] *
                 tmp[(static_cast<std::size_t>(ys) * w + x) * ch + c];
        }
        out.at(x, y, c) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

Map blend_weight_map(const QualityPattern& pattern, const EccentricityMap& em,
                     const ZoneScheme& scheme, double belt_width_deg) {
  scheme.validate();
  if (static_cast<int>(pattern.hq.size()) != scheme.zone_count())
    throw std::invalid_argument("blend weights: pattern flag count must match the zone count");
  if (belt_width_deg < 0)
    throw std::invalid_argument("blend weights: belt width must be non-negative");

  // Quality switches and their signed steps, in boundary order.
  struct Switch {
    double at_deg;
    double delta;
  };
  std::vector<Switch> switches;
  for (int k = 0; k + 1 < scheme.zone_count(); ++k) {
    if (pattern.hq[k] != pattern.hq[k + 1])
      switches.push_back({scheme.edges_deg[static_cast<std::size_t>(k + 1)],
                          pattern.hq[k + 1] ? 1.0 : -1.0});
  }
  const double base = pattern.hq[0] ? 1.0 : 0.0;

  Map weights(em.deg.width, em.deg.height);
  for (std::size_t i = 0; i < em.deg.data.size(); ++i) {
    const double e = em.deg.data[i];
    double w = base;
    for (const auto& s : switches) {
      // Belt sits on the outward side of the boundary so the inner zone
      // keeps its designed quality.
      double ramp;
      if (belt_width_deg == 0.0)
        ramp = e >= s.at_deg ? 1.0 : 0.0;
      else
        ramp = std::clamp((e - s.at_deg) / belt_width_deg, 0.0, 1.0);
      w += s.delta * ramp;
    }
    weights.data[i] = w;
  }
  return weights;
}

namespace {

Image blend_quantized(const Image& source, const Image& blurred, const Map& weights) {
  Image out(source.width, source.height, source.channels, source.bit_depth);
  const double max = source.max_value();
  for (int y = 0; y < source.height; ++y) {
    for (int x = 0; x < source.width; ++x) {
      const double w = weights.at(x, y);
      for (int c = 0; c < source.channels; ++c) {
        const double v = w * source.at(x, y, c) + (1.0 - w) * blurred.at(x, y, c);
        out.at(x, y, c) = static_cast<float>(std::clamp(std::nearbyint(v), 0.0, max));
      }
    }
  }
  return out;
}

}  // namespace

Image generate_stimulus(const Image& source, const StimulusSpec& spec, const EccentricityMap& em,
                        const ZoneScheme& scheme) {
  if (source.width != em.deg.width || source.height != em.deg.height)
    throw std::invalid_argument("generate_stimulus: source and eccentricity map dims differ");
  const Map weights = blend_weight_map(spec.pattern, em, scheme, spec.belt_width_deg);
  const Image blurred = gaussian_blur(source, spec.sigma, spec.kernel_extent);
  return blend_quantized(source, blurred, weights);
}

std::string stimulus_id(const std::string& source_id, const std::string& pattern_id, double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", sigma);
  return source_id + "_" + pattern_id + "_s" + buf;
}

std::vector<StimulusRecord> generate_database(const std::vector<SourceRef>& sources,
                                              const DatabaseConfig& config,
                                              const ImageLoader& loader, const StimulusSink& sink,
                                              int jobs) {
  std::vector<StimulusRecord> records;
  for (const auto& src : sources) {
    const Image source = loader(src);
    if (source.width != config.em.deg.width || source.height != config.em.deg.height)
      throw std::runtime_error("source '" + src.id + "' does not match the viewport raster");

    // Each sigma level is blurred once per source and shared across patterns.
    std::set<double> sigma_set;
    for (const auto& p : config.patterns) {
      auto it = config.sigmas.find(p.scenario);
      if (it == config.sigmas.end() || it->second.empty())
        throw ValidationError("no sigma grid configured for scenario " + to_string(p.scenario));
      sigma_set.insert(it->second.begin(), it->second.end());
    }
    std::vector<double> sigma_list(sigma_set.begin(), sigma_set.end());
    std::vector<Image> blurred(sigma_list.size());
    parallel_for(sigma_list.size(), jobs, [&](std::size_t i) {
      blurred[i] = gaussian_blur(source, sigma_list[i], config.kernel_extent);
    });

    struct Job {
      StimulusRecord record;
      const Image* blurred;
      Map weights;
    };
    std::vector<Job> batch;
    for (const auto& p : config.patterns) {
      Map weights = blend_weight_map(p, config.em, config.scheme, config.belt_width_deg);
      for (double sigma : config.sigmas.at(p.scenario)) {
        Job job;
        job.record = {stimulus_id(src.id, p.id, sigma), src.id, p.id,
                      p.scenario,  sigma, config.belt_width_deg};
        const auto sit = std::find(sigma_list.begin(), sigma_list.end(), sigma);
        job.blurred = &blurred[static_cast<std::size_t>(sit - sigma_list.begin())];
        job.weights = weights;
        batch.push_back(std::move(job));
      }
    }
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
      const Job& job = batch[i];
      sink(job.record, blend_quantized(source, *job.blurred, job.weights));
    });
    for (auto& job : batch) records.push_back(std::move(job.record));
  }
  return records;
}

}  // namespace fovqa
