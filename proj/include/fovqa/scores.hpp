#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fovqa/eval.hpp"
#include "fovqa/stimulus.hpp"

namespace fovqa {

struct ScoreRow {
  std::string stimulus_id;
  std::string metric_id;
  double score = 0.0;  // may be +/-inf
  std::string provenance = "computed";
  // Per-zone luminance MSE of the stimulus; empty cell = zone absent.
  std::vector<std::optional<double>> zone_mse;
};

// One row per (stimulus_id, metric_id); rows are sorted on write.
struct ScoresTable {
  int zone_count = 0;
  std::vector<ScoreRow> rows;
};

// Header: stimulus_id,metric_id,score,provenance,zone_mse_1..K.
// Floats carry 9 significant digits; infinities serialize as "inf"/"-inf".
// Written atomically.
void write_scores_csv(const ScoresTable& table, const std::string& path);
ScoresTable read_scores_csv(const std::string& path);

// Header: stimulus_id,mos.
std::map<std::string, double> read_mos_csv(const std::string& path);
void write_mos_csv(const std::map<std::string, double>& mos, const std::string& path);

// Stimulus index emitted by database generation so later stages can map
// stimuli back to sources, scenarios and files.
struct StimulusIndexRow {
  StimulusRecord record;
  std::string path;
};
void write_stimulus_index(const std::vector<StimulusIndexRow>& rows, const std::string& path);
std::vector<StimulusIndexRow> read_stimulus_index(const std::string& path);

// Fit summaries: metric,group,beta1..beta5,w1..wK,pcc,rmse. Weight cells
// stay empty for fits without zone weights.
struct FitRow {
  std::string metric_id;
  std::string group;
  FitResult fit;
};
void write_fit_csv(const std::vector<FitRow>& rows, int zone_count, const std::string& path);

}  // namespace fovqa
