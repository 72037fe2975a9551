#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fovqa/manifest.hpp"

namespace fovqa {

struct PipelineOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed;  // overrides the manifest seed
  std::string out_dir;                // overrides the manifest out_dir
  std::vector<std::string> metrics;   // empty = every in-scope metric
  std::string group_by;               // "image" | "all"; empty = command default
};

const std::vector<std::string>& pipeline_commands();

// Runs one stage end to end. Stage results land under the effective output
// directory; human-readable summaries go to `out`. Failures propagate as
// exceptions (ValidationError for bad inputs).
void run_pipeline(const Manifest& manifest, const std::string& command,
                  const PipelineOptions& options, std::ostream& out);

}  // namespace fovqa
