#include "fovqa/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fovqa/eval.hpp"
#include "fovqa/metrics.hpp"
#include "fovqa/scores.hpp"
#include "fovqa/svg.hpp"
#include "fovqa/util.hpp"
#include "fovqa/zwf.hpp"

namespace fovqa {

namespace fs = std::filesystem;

namespace {

struct Context {
  const Manifest& m;
  PipelineOptions opt;
  std::string out_dir;
  std::uint64_t seed;
  VirtualGeometry vg;
  EccentricityMap em;
  ZoneMap zmap;
  Map fweights;

  explicit Context(const Manifest& manifest, const PipelineOptions& options)
      : m(manifest), opt(options) {
    out_dir = opt.out_dir.empty() ? m.out_dir : opt.out_dir;
    seed = opt.seed ? *opt.seed : m.seed;
    vg = derive_virtual_geometry(m.display);
    em = eccentricity_map(vg, (m.display.viewport_width_px - 1) / 2.0,
                          (m.display.viewport_height_px - 1) / 2.0);
    zmap = zone_map(em, m.zones);
    fweights = foveal_weight_map(em, FoveationModel::from_geometry(vg));
  }

  std::string path(const std::string& rel) const { return (fs::path(out_dir) / rel).string(); }

  const ManifestSource& source(const std::string& id) const {
    for (const auto& s : m.sources)
      if (s.id == id) return s;
    throw std::runtime_error("unknown source id '" + id + "' (stale stimulus index?)");
  }

  // The reference viewport: source panorama projected and quantized, i.e.
  // exactly what `extract` writes to disk.
  Image load_viewport(const ManifestSource& src) const {
    Image equi = load_pnm(src.path);
    validate_equirect(equi);
    return quantize(extract_viewport(equi, m.viewport_spec(src)));
  }

  std::vector<std::string> metric_list() const {
    if (opt.metrics.empty()) return metric_ids();
    for (const auto& id : opt.metrics)
      if (std::find(metric_ids().begin(), metric_ids().end(), id) == metric_ids().end())
        throw ValidationError("unknown metric id '" + id + "'");
    return opt.metrics;
  }

  std::string effective_group_by(const std::string& command_default) const {
    const std::string g = opt.group_by.empty() ? command_default : opt.group_by;
    if (g != "image" && g != "all")
      throw ValidationError("group-by must be 'image' or 'all', got '" + g + "'");
    return g;
  }
};

std::string image_ext(const Image& img) { return img.channels == 1 ? ".pgm" : ".ppm"; }

void run_geometry(const Context& ctx, std::ostream& out) {
  const VirtualGeometry& vg = ctx.vg;
  const auto [dpp_x, dpp_y] = degrees_per_pixel(vg);
  const FoveationModel fm = FoveationModel::from_geometry(vg);
  out << "lens_to_virtual_mm = " << format_float(vg.lens_to_virtual_mm) << "\n"
      << "eye_to_virtual_mm = " << format_float(vg.eye_to_virtual_mm) << "\n"
      << "magnification = " << format_float(vg.magnification) << "\n"
      << "virtual_width_mm = " << format_float(vg.width_mm) << "\n"
      << "virtual_height_mm = " << format_float(vg.height_mm) << "\n"
      << "pitch_x_mm = " << format_float(vg.pitch_x_mm()) << "\n"
      << "pitch_y_mm = " << format_float(vg.pitch_y_mm()) << "\n"
      << "degrees_per_pixel_x = " << format_float(dpp_x) << "\n"
      << "degrees_per_pixel_y = " << format_float(dpp_y) << "\n"
      << "display_nyquist_cpd = " << format_float(fm.display_nyquist_cpd) << "\n";
}

void run_extract(const Context& ctx, std::ostream& out) {
  fs::create_directories(ctx.path("viewports"));
  parallel_for(ctx.m.sources.size(), ctx.opt.jobs, [&](std::size_t i) {
    const auto& src = ctx.m.sources[i];
    const Image vp = ctx.load_viewport(src);
    save_pnm(vp, ctx.path("viewports/" + src.id + image_ext(vp)));
  });
  out << "extracted " << ctx.m.sources.size() << " viewports\n";
}

void run_make_stimuli(const Context& ctx, std::ostream& out) {
  fs::create_directories(ctx.path("stimuli"));

  DatabaseConfig cfg;
  cfg.scheme = ctx.m.zones;
  cfg.em = ctx.em;
  for (const auto& pid : ctx.m.pattern_ids) cfg.patterns.push_back(quality_pattern(pid));
  cfg.sigmas = ctx.m.sigmas;
  cfg.belt_width_deg = ctx.m.belt_width_deg;
  cfg.kernel_extent = ctx.m.kernel_extent;

  std::vector<SourceRef> sources;
  for (const auto& s : ctx.m.sources) sources.push_back({s.id, s.path});

  std::vector<StimulusIndexRow> index;
  std::mutex index_mutex;
  const auto records = generate_database(
      sources, cfg, [&](const SourceRef& ref) { return ctx.load_viewport(ctx.source(ref.id)); },
      [&](const StimulusRecord& rec, const Image& img) {
        const std::string rel = "stimuli/" + rec.stimulus_id + image_ext(img);
        save_pnm(img, ctx.path(rel));
        std::lock_guard<std::mutex> lock(index_mutex);
        index.push_back({rec, rel});
      },
      ctx.opt.jobs);

  write_stimulus_index(index, ctx.path("stimuli.csv"));
  out << "generated " << records.size() << " stimuli\n";
}

std::vector<StimulusIndexRow> load_index(const Context& ctx, const char* stage) {
  const std::string path = ctx.path("stimuli.csv");
  if (!fs::exists(path))
    throw std::runtime_error(std::string(stage) + " needs " + path + "; run make-stimuli first");
  return read_stimulus_index(path);
}

void run_score(const Context& ctx, std::ostream& out) {
  const auto index = load_index(ctx, "score");
  const auto metrics = ctx.metric_list();

  std::map<std::string, std::vector<const StimulusIndexRow*>> by_source;
  for (const auto& row : index) by_source[row.record.source_id].push_back(&row);

  const MetricContext mctx{ctx.vg, ctx.fweights};
  ScoresTable table;
  table.zone_count = ctx.m.zones.zone_count();

  for (const auto& [source_id, rows] : by_source) {
    const Image ref = ctx.load_viewport(ctx.source(source_id));
    std::vector<std::vector<ScoreRow>> slots(rows.size());
    parallel_for(rows.size(), ctx.opt.jobs, [&](std::size_t i) {
      const auto& entry = *rows[i];
      const fs::path p = fs::path(entry.path).is_absolute() ? fs::path(entry.path)
                                                            : fs::path(ctx.out_dir) / entry.path;
      const Image dist = load_pnm(p.string());
      const ZoneMseVector zones = zone_mse(ref, dist, ctx.zmap);
      std::vector<std::optional<double>> zone_cells;
      for (int k = 0; k < table.zone_count; ++k)
        zone_cells.push_back(k < zones.zone_count() && zones.present(k)
                                 ? std::optional<double>(zones.mse[static_cast<std::size_t>(k)])
                                 : std::nullopt);
      for (const auto& metric : metrics) {
        ScoreRow row;
        row.stimulus_id = entry.record.stimulus_id;
        row.metric_id = metric;
        row.score = score_metric(metric, ref, dist, mctx);
        row.provenance = "computed";
        row.zone_mse = zone_cells;
        slots[i].push_back(std::move(row));
      }
    });
    for (auto& slot : slots)
      for (auto& row : slot) table.rows.push_back(std::move(row));
  }

  write_scores_csv(table, ctx.path("scores.csv"));
  out << "scored " << index.size() << " stimuli x " << metrics.size() << " metrics\n";
}

// ---- shared joins for the fitting stages ----

std::map<std::string, double> require_mos(const Context& ctx, const char* stage) {
  if (ctx.m.mos_csv.empty())
    throw ValidationError(std::string(stage) + " needs the manifest field mos_csv");
  return read_mos_csv(ctx.m.mos_csv);
}

// Zone-MSE vector per stimulus, taken from the first scores row carrying a
// complete set of zone cells.
std::map<std::string, ZoneMseVector> zone_vectors(const ScoresTable& table) {
  std::map<std::string, ZoneMseVector> out;
  for (const auto& row : table.rows) {
    if (out.count(row.stimulus_id)) continue;
    bool complete = !row.zone_mse.empty();
    for (const auto& z : row.zone_mse) complete = complete && z.has_value();
    if (!complete) continue;
    ZoneMseVector zm;
    for (const auto& z : row.zone_mse) {
      zm.mse.push_back(*z);
      zm.pixel_count.push_back(1);  // presence only; counts are not serialized
    }
    out.emplace(row.stimulus_id, std::move(zm));
  }
  return out;
}

std::map<std::string, std::string> source_of_stimulus(const std::vector<StimulusIndexRow>& index) {
  std::map<std::string, std::string> out;
  for (const auto& row : index) out[row.record.stimulus_id] = row.record.source_id;
  return out;
}

// group id -> stimulus ids, honoring --group-by.
std::map<std::string, std::vector<std::string>> group_stimuli(
    const std::set<std::string>& stimulus_ids, const std::map<std::string, std::string>& sources,
    const std::string& group_by) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& id : stimulus_ids) {
    if (group_by == "all") {
      groups["all"].push_back(id);
    } else {
      const auto it = sources.find(id);
      if (it == sources.end())
        throw std::runtime_error("stimulus " + id + " is missing from stimuli.csv");
      groups[it->second].push_back(id);
    }
  }
  return groups;
}

void run_fit_weights(const Context& ctx, std::ostream& out) {
  const auto mos = require_mos(ctx, "fit-weights");
  const auto table = read_scores_csv(ctx.path("scores.csv"));
  const auto vectors = zone_vectors(table);
  const auto sources = source_of_stimulus(load_index(ctx, "fit-weights"));

  std::set<std::string> ids;
  for (const auto& [id, zm] : vectors)
    if (mos.count(id)) ids.insert(id);
  if (ids.size() < vectors.size())
    std::cerr << "fit-weights: " << vectors.size() - ids.size()
              << " stimuli lack MOS entries and are skipped\n";

  std::vector<FitRow> rows;
  for (const auto& [group, members] : group_stimuli(ids, sources, ctx.effective_group_by("image"))) {
    std::vector<ZoneMseVector> zms;
    std::vector<double> y;
    for (const auto& id : members) {
      zms.push_back(vectors.at(id));
      y.push_back(mos.at(id));
    }
    rows.push_back({"zwf", group, fit_zone_weights(zms, y, ctx.seed)});
  }
  write_fit_csv(rows, ctx.m.zones.zone_count(), ctx.path("weights.csv"));
  out << "fitted zone weights for " << rows.size() << " group(s)\n";
}

void run_evaluate(const Context& ctx, std::ostream& out) {
  const auto mos = require_mos(ctx, "evaluate");
  const auto table = read_scores_csv(ctx.path("scores.csv"));
  const auto vectors = zone_vectors(table);
  const auto sources = source_of_stimulus(load_index(ctx, "evaluate"));
  const std::string group_by = ctx.effective_group_by("all");

  // Metrics present in the table, optionally narrowed by --metrics. Rows
  // with external provenance participate like computed ones.
  std::set<std::string> present;
  for (const auto& row : table.rows) present.insert(row.metric_id);
  std::vector<std::string> metrics;
  if (ctx.opt.metrics.empty()) {
    metrics.assign(present.begin(), present.end());
  } else {
    for (const auto& id : ctx.opt.metrics) {
      if (!present.count(id))
        throw ValidationError("metric '" + id + "' does not appear in scores.csv");
      metrics.push_back(id);
    }
  }

  std::map<std::string, std::map<std::string, double>> score_of;  // metric -> stimulus -> value
  std::set<std::string> stimulus_ids;
  for (const auto& row : table.rows) {
    score_of[row.metric_id][row.stimulus_id] = row.score;
    if (mos.count(row.stimulus_id)) stimulus_ids.insert(row.stimulus_id);
  }

  const auto groups = group_stimuli(stimulus_ids, sources, group_by);
  std::vector<FitRow> rows;
  for (const auto& [group, members] : groups) {
    for (const auto& metric : metrics) {
      std::vector<double> x, y;
      int dropped = 0;
      for (const auto& id : members) {
        const auto it = score_of[metric].find(id);
        if (it == score_of[metric].end()) continue;
        if (!std::isfinite(it->second)) {
          ++dropped;
          continue;
        }
        x.push_back(it->second);
        y.push_back(mos.at(id));
      }
      if (dropped > 0)
        std::cerr << "evaluate: dropped " << dropped << " non-finite " << metric
                  << " score(s) in group " << group << "\n";
      rows.push_back({metric, group, evaluate_metric(x, y, ctx.seed)});
    }

    std::vector<ZoneMseVector> zms;
    std::vector<double> y;
    for (const auto& id : members) {
      const auto it = vectors.find(id);
      if (it == vectors.end()) continue;
      zms.push_back(it->second);
      y.push_back(mos.at(id));
    }
    rows.push_back({"zwf", group, fit_zone_weights(zms, y, ctx.seed)});
  }

  write_fit_csv(rows, ctx.m.zones.zone_count(), ctx.path("evaluate.csv"));
  out << "evaluated " << metrics.size() << " metric(s) + zwf over " << groups.size()
      << " group(s)\n";
}

void run_report(const Context& ctx, std::ostream& out) {
  const auto mos = require_mos(ctx, "report");
  const auto table = read_scores_csv(ctx.path("scores.csv"));
  const auto index = load_index(ctx, "report");

  std::map<std::string, const StimulusIndexRow*> record_of;
  for (const auto& row : index) record_of[row.record.stimulus_id] = &row;

  std::set<std::string> present;
  std::map<std::string, std::map<std::string, double>> score_of;
  for (const auto& row : table.rows) {
    present.insert(row.metric_id);
    score_of[row.metric_id][row.stimulus_id] = row.score;
  }
  std::vector<std::string> metrics;
  if (ctx.opt.metrics.empty()) {
    metrics.assign(present.begin(), present.end());
  } else {
    for (const auto& id : ctx.opt.metrics) {
      if (!present.count(id))
        throw ValidationError("metric '" + id + "' does not appear in scores.csv");
      metrics.push_back(id);
    }
  }

  std::set<std::string> stimulus_ids;
  for (const auto& row : table.rows)
    if (mos.count(row.stimulus_id) && record_of.count(row.stimulus_id))
      stimulus_ids.insert(row.stimulus_id);

  // Joined per-stimulus table.
  std::ostringstream csv;
  csv << "stimulus_id,source_id,pattern_id,scenario,sigma,mos";
  for (const auto& metric : metrics) csv << "," << metric;
  csv << "\n";
  for (const auto& id : stimulus_ids) {
    const auto& rec = record_of.at(id)->record;
    csv << id << "," << rec.source_id << "," << rec.pattern_id << "," << to_string(rec.scenario)
        << "," << format_float(rec.sigma) << "," << format_float(mos.at(id));
    for (const auto& metric : metrics) {
      csv << ",";
      const auto it = score_of[metric].find(id);
      if (it != score_of[metric].end()) csv << format_float(it->second);
    }
    csv << "\n";
  }
  atomic_write_file(ctx.path("report.csv"), csv.str());

  // One scatter per metric, scenario-split, with the fitted mapping when
  // enough finite points exist.
  for (const auto& metric : metrics) {
    ScatterPlot plot;
    plot.title = metric + " vs MOS";
    plot.x_label = metric;
    plot.y_label = "MOS";
    plot.series.resize(2);
    plot.series[0].label = "S1 (center high)";
    plot.series[1].label = "S2 (center low)";
    std::vector<double> x, y;
    for (const auto& id : stimulus_ids) {
      const auto it = score_of[metric].find(id);
      if (it == score_of[metric].end() || !std::isfinite(it->second)) continue;
      const int s = record_of.at(id)->record.scenario == Scenario::S1 ? 0 : 1;
      plot.series[static_cast<std::size_t>(s)].points.push_back({it->second, mos.at(id)});
      x.push_back(it->second);
      y.push_back(mos.at(id));
    }
    if (x.size() >= 5) {
      const FitResult fit = evaluate_metric(x, y, ctx.seed);
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      for (int i = 0; i <= 100; ++i) {
        const double fx = *lo + (*hi - *lo) * i / 100.0;
        plot.curve.push_back({fx, logistic5(fx, fit.params)});
      }
    }
    atomic_write_file(ctx.path("scatter_" + metric + ".svg"), render_scatter_svg(plot));
  }
  out << "report over " << stimulus_ids.size() << " stimuli and " << metrics.size()
      << " metric(s)\n";
}

}  // namespace

const std::vector<std::string>& pipeline_commands() {
  static const std::vector<std::string> commands = {
      "geometry", "extract", "make-stimuli", "score", "fit-weights", "evaluate", "report"};
  return commands;
}

void run_pipeline(const Manifest& manifest, const std::string& command,
                  const PipelineOptions& options, std::ostream& out) {
  const Context ctx(manifest, options);
  if (command == "geometry") return run_geometry(ctx, out);
  if (command == "extract") return run_extract(ctx, out);
  if (command == "make-stimuli") return run_make_stimuli(ctx, out);
  if (command == "score") return run_score(ctx, out);
  if (command == "fit-weights") return run_fit_weights(ctx, out);
  if (command == "evaluate") return run_evaluate(ctx, out);
  if (command == "report") return run_report(ctx, out);
  throw ValidationError("unknown command '" + command + "'");
}

}  // namespace fovqa
