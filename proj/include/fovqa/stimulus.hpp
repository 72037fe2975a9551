#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fovqa/geometry.hpp"
#include "fovqa/image.hpp"

namespace fovqa {

// Stimulus family: S1 keeps the center sharp and degrades the periphery,
// S2 the reverse.
enum class Scenario { S1, S2 };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// HQ/LQ assignment per zone. The standard patterns P1..P8 switch quality
// exactly once: P1..P4 keep a growing central prefix sharp, P5..P8 a
// shrinking peripheral suffix.
struct QualityPattern {
  std::string id;
  Scenario scenario = Scenario::S1;
  std::vector<bool> hq;  // one flag per zone, true = keep source quality
};

const std::vector<QualityPattern>& standard_patterns();
QualityPattern quality_pattern(const std::string& id);

struct StimulusSpec {
  std::string source_id;
  QualityPattern pattern;
  double sigma = 2.0;
  int kernel_extent = 50;  // nominal taps; rounded up to the nearest odd count
  double belt_width_deg = 5.0;
};

// Normalized sampled-Gaussian taps, odd length, sum exactly renormalized to 1.
std::vector<double> gaussian_kernel(double sigma, int kernel_extent);

// Separable convolution with mirrored edges. Throws for sigma <= 0.
Image gaussian_blur(const Image& img, double sigma, int kernel_extent = 50);

// Per-pixel source weight in [0, 1]: 1 in HQ zones, 0 in LQ zones, a
// linear ramp over [boundary, boundary + belt) wherever adjacent zones
// switch quality.
Map blend_weight_map(const QualityPattern& pattern, const EccentricityMap& em,
                     const ZoneScheme& scheme, double belt_width_deg);

// w * source + (1 - w) * blurred, quantized to the integer grid at the end.
Image generate_stimulus(const Image& source, const StimulusSpec& spec, const EccentricityMap& em,
                        const ZoneScheme& scheme);

struct StimulusRecord {
  std::string stimulus_id;
  std::string source_id;
  std::string pattern_id;
  Scenario scenario = Scenario::S1;
  double sigma = 0.0;
  double belt_width_deg = 5.0;
};

struct SourceRef {
  std::string id;
  std::string path;
};

struct DatabaseConfig {
  ZoneScheme scheme;
  EccentricityMap em;
  std::vector<QualityPattern> patterns;
  std::map<Scenario, std::vector<double>> sigmas;  // per-scenario blur levels
  double belt_width_deg = 5.0;
  int kernel_extent = 50;
};

// The loader resolves a source reference to the raster stimuli are built
// from and reports a missing file by throwing.
using ImageLoader = std::function<Image(const SourceRef&)>;
using StimulusSink = std::function<void(const StimulusRecord&, const Image&)>;

// Deterministic stimulus id: "<source>_<pattern>_s<sigma>".
std::string stimulus_id(const std::string& source_id, const std::string& pattern_id, double sigma);

// Generates sources x patterns x per-scenario sigmas stimuli, invoking the
// sink for each. With jobs > 1 the sink runs on worker threads and must be
// safe to call concurrently. The returned records are in generation order
// regardless of the number of jobs.
std::vector<StimulusRecord> generate_database(const std::vector<SourceRef>& sources,
                                              const DatabaseConfig& config,
                                              const ImageLoader& loader, const StimulusSink& sink,
                                              int jobs = 1);

}  // namespace fovqa
