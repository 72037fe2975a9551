#include "fovqa/scores.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fovqa/util.hpp"

namespace fovqa {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

double parse_score(const std::string& cell, const std::string& context) {
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": bad number '" + cell + "'");
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line != "\r") lines.push_back(line);
  return lines;
}

}  // namespace

void write_scores_csv(const ScoresTable& table, const std::string& path) {
  auto rows = table.rows;
  std::sort(rows.begin(), rows.end(), [](const ScoreRow& a, const ScoreRow& b) {
    return std::tie(a.stimulus_id, a.metric_id) < std::tie(b.stimulus_id, b.metric_id);
  });
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto& r : rows)
    if (!keys.insert({r.stimulus_id, r.metric_id}).second)
      throw std::runtime_error("scores table has duplicate row " + r.stimulus_id + "/" +
                               r.metric_id);

  std::ostringstream out;
  out << "stimulus_id,metric_id,score,provenance";
  for (int k = 1; k <= table.zone_count; ++k) out << ",zone_mse_" << k;
  out << "\n";
  for (const auto& r : rows) {
    if (static_cast<int>(r.zone_mse.size()) != table.zone_count)
      throw std::runtime_error("scores row " + r.stimulus_id + "/" + r.metric_id +
                               " carries a wrong zone count");
    out << r.stimulus_id << "," << r.metric_id << "," << format_float(r.score) << ","
        << r.provenance;
    for (const auto& z : r.zone_mse) out << "," << (z ? format_float(*z) : std::string());
    out << "\n";
  }
  atomic_write_file(path, out.str());
}

ScoresTable read_scores_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty scores file");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 4 || header[0] != "stimulus_id" || header[1] != "metric_id" ||
      header[2] != "score" || header[3] != "provenance")
    throw std::runtime_error(path + ": unexpected scores header");
  ScoresTable table;
  table.zone_count = static_cast<int>(header.size()) - 4;
  for (int k = 0; k < table.zone_count; ++k)
    if (header[static_cast<std::size_t>(4 + k)] != "zone_mse_" + std::to_string(k + 1))
      throw std::runtime_error(path + ": unexpected zone column header");

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ": line " + std::to_string(i + 1) + " has " +
                               std::to_string(cells.size()) + " cells");
    ScoreRow row;
    row.stimulus_id = cells[0];
    row.metric_id = cells[1];
    row.score = parse_score(cells[2], path + ":" + std::to_string(i + 1));
    row.provenance = cells[3];
    for (int k = 0; k < table.zone_count; ++k) {
      const auto& cell = cells[static_cast<std::size_t>(4 + k)];
      if (cell.empty())
        row.zone_mse.emplace_back(std::nullopt);
      else
        row.zone_mse.emplace_back(parse_score(cell, path + ":" + std::to_string(i + 1)));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::map<std::string, double> read_mos_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty MOS file");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header[0] != "stimulus_id" || header[1] != "mos")
    throw std::runtime_error(path + ": expected header stimulus_id,mos");
  std::map<std::string, double> mos;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() < 2)
      throw std::runtime_error(path + ": line " + std::to_string(i + 1) + " is too short");
    if (!mos.emplace(cells[0], parse_score(cells[1], path)).second)
      throw std::runtime_error(path + ": duplicate stimulus id " + cells[0]);
  }
  return mos;
}

void write_mos_csv(const std::map<std::string, double>& mos, const std::string& path) {
  std::ostringstream out;
  out << "stimulus_id,mos\n";
  for (const auto& [id, value] : mos) out << id << "," << format_float(value) << "\n";
  atomic_write_file(path, out.str());
}

void write_stimulus_index(const std::vector<StimulusIndexRow>& rows, const std::string& path) {
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const StimulusIndexRow& a, const StimulusIndexRow& b) {
    return a.record.stimulus_id < b.record.stimulus_id;
  });
  std::ostringstream out;
  out << "stimulus_id,source_id,pattern_id,scenario,sigma,belt_width_deg,path\n";
  for (const auto& r : sorted) {
    out << r.record.stimulus_id << "," << r.record.source_id << "," << r.record.pattern_id << ","
        << to_string(r.record.scenario) << "," << format_float(r.record.sigma) << ","
        << format_float(r.record.belt_width_deg) << "," << r.path << "\n";
  }
  atomic_write_file(path, out.str());
}

std::vector<StimulusIndexRow> read_stimulus_index(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::runtime_error(path + ": empty stimulus index");
  if (lines[0] != "stimulus_id,source_id,pattern_id,scenario,sigma,belt_width_deg,path")
    throw std::runtime_error(path + ": unexpected stimulus index header");
  std::vector<StimulusIndexRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 7)
      throw std::runtime_error(path + ": line " + std::to_string(i + 1) + " has " +
                               std::to_string(cells.size()) + " cells");
    StimulusIndexRow row;
    row.record.stimulus_id = cells[0];
    row.record.source_id = cells[1];
    row.record.pattern_id = cells[2];
    row.record.scenario = scenario_from_string(cells[3]);
    row.record.sigma = parse_score(cells[4], path);
    row.record.belt_width_deg = parse_score(cells[5], path);
    row.path = cells[6];
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_fit_csv(const std::vector<FitRow>& rows, int zone_count, const std::string& path) {
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const FitRow& a, const FitRow& b) {
    return std::tie(a.metric_id, a.group) < std::tie(b.metric_id, b.group);
  });
  std::ostringstream out;
  out << "metric,group,beta1,beta2,beta3,beta4,beta5";
  for (int k = 1; k <= zone_count; ++k) out << ",w" << k;
  out << ",pcc,rmse\n";
  for (const auto& r : sorted) {
    out << r.metric_id << "," << r.group;
    for (double b : r.fit.params.beta) out << "," << format_float(b);
    for (int k = 0; k < zone_count; ++k) {
      out << ",";
      if (r.fit.weights && k < r.fit.weights->zone_count())
        out << format_float(r.fit.weights->w[static_cast<std::size_t>(k)]);
    }
    out << "," << format_float(r.fit.pcc) << "," << format_float(r.fit.rmse) << "\n";
  }
  atomic_write_file(path, out.str());
}

}  // namespace fovqa
