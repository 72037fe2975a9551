#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fovqa/image.hpp"
#include "fovqa/manifest.hpp"
#include "fovqa/scores.hpp"
#include "fovqa/svg.hpp"
#include "fovqa/util.hpp"
#include "helpers.hpp"

using namespace fovqa;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

// Geometry block shared by the manifest fixtures.
const char* kGeometry = R"(  "geometry": {
    "focal_length_mm": 62.0,
    "lens_to_display_mm": 25.0,
    "lens_to_eye_mm": 10.0,
    "viewport_width_px": 1280,
    "viewport_height_px": 1440,
    "pixel_pitch_mm": 0.04375
  })";

std::string manifest_with_sources(int n, const std::string& source_path,
                                  const std::string& extra = "") {
  std::string sources;
  for (int i = 0; i < n; ++i) {
    if (i) sources += ",\n";
    sources += "    {\"id\": \"I" + std::to_string(i + 1) + "\", \"path\": \"" + source_path +
               "\", \"yaw_deg\": " + std::to_string(i * 40.0) + "}";
  }
  return std::string("{\n") + kGeometry + ",\n  \"sources\": [\n" + sources + "\n  ]" + extra +
         "\n}\n";
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("float formatting") {
  CHECK(format_float(1550.0 / 37.0) == "41.8918919");
  CHECK(format_float(0.0) == "0");
  CHECK(format_float(0.5) == "0.5");
  CHECK(format_float(kInf) == "inf");
  CHECK(format_float(-kInf) == "-inf");
}

TEST_CASE("atomic file writes") {
  test::TempDir dir;
  const std::string path = dir.str("nested") + "/file.txt";
  atomic_write_file(path, "first\n");
  CHECK(read_text_file(path) == "first\n");
  atomic_write_file(path, "second\n");
  CHECK(read_text_file(path) == "second\n");
  CHECK_THROWS(read_text_file(dir.str("missing.txt")));
}

TEST_CASE("quantize rounds and clamps") {
  Image img(5, 1, 1);
  img.at(0, 0) = 127.4f;
  img.at(1, 0) = 127.6f;
  img.at(2, 0) = -3.0f;
  img.at(3, 0) = 300.0f;
  img.at(4, 0) = 80.0f;
  const Image q = quantize(img);
  CHECK(q.at(0, 0) == 127.0f);
  CHECK(q.at(1, 0) == 128.0f);
  CHECK(q.at(2, 0) == 0.0f);
  CHECK(q.at(3, 0) == 255.0f);
  CHECK(q.at(4, 0) == 80.0f);

  Image wide(1, 1, 1, 16);
  wide.at(0, 0) = 70000.0f;
  CHECK(quantize(wide).at(0, 0) == 65535.0f);
}

TEST_CASE("pnm round-trips") {
  test::TempDir dir;

  SUBCASE("8-bit grayscale") {
    const Image img = test::noise_image(17, 9, 1, 5);
    save_pnm(img, dir.str("g.pgm"));
    const Image back = load_pnm(dir.str("g.pgm"));
    CHECK(back.bit_depth == 8);
    REQUIRE(back.same_dims(img));
    CHECK(back.data == img.data);
  }
  SUBCASE("8-bit color") {
    const Image img = test::noise_image(6, 4, 3, 6);
    save_pnm(img, dir.str("c.ppm"));
    const Image back = load_pnm(dir.str("c.ppm"));
    CHECK(back.channels == 3);
    CHECK(back.data == img.data);
  }
  SUBCASE("16-bit grayscale") {
    Image img(4, 3, 1, 16);
    for (std::size_t i = 0; i < img.data.size(); ++i)
      img.data[i] = static_cast<float>(i * 5000 + 7);
    save_pnm(img, dir.str("deep.pgm"));
    const Image back = load_pnm(dir.str("deep.pgm"));
    CHECK(back.bit_depth == 16);
    CHECK(back.data == img.data);
  }
  SUBCASE("missing file") { CHECK_THROWS(load_pnm(dir.str("absent.pgm"))); }
}

TEST_CASE("pfm round-trip") {
  test::TempDir dir;
  Map m(3, 2);
  m.at(0, 0) = 1.5;
  m.at(1, 0) = -2.25;
  m.at(2, 1) = 40.0625;
  save_pfm(m, dir.str("m.pfm"));
  const Map back = load_pfm(dir.str("m.pfm"));
  REQUIRE(back.width == 3);
  REQUIRE(back.height == 2);
  CHECK(back.data == m.data);
}

TEST_CASE("zone map export") {
  test::TempDir dir;
  ZoneMap zm(4, 2);
  for (int i = 0; i < 8; ++i) zm.zones[static_cast<std::size_t>(i)] = i % 5;
  save_zone_map(zm, dir.str("zones.pgm"));
  const Image img = load_pnm(dir.str("zones.pgm"));
  REQUIRE(img.width == 4);
  REQUIRE(img.height == 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 4; ++x) CHECK(img.at(x, y) == static_cast<float>(zm.at(x, y)));
}

TEST_CASE("scores csv round-trip") {
  test::TempDir dir;
  ScoresTable table;
  table.zone_count = 2;
  table.rows.push_back({"I2_P1_s2", "vpsnr", 31.25, "computed", {12.5, std::nullopt}});
  table.rows.push_back({"I1_P1_s2", "vpsnr", kInf, "computed", {0.0, 0.5}});
  table.rows.push_back({"I1_P1_s2", "mse", -0.5, "external", {std::nullopt, std::nullopt}});
  const std::string path = dir.str("scores.csv");
  write_scores_csv(table, path);

  const std::string text = read_text_file(path);
  CHECK(text.rfind("stimulus_id,metric_id,score,provenance,zone_mse_1,zone_mse_2\n", 0) == 0);
  // Sorted by (stimulus, metric); absent zones stay empty.
  CHECK(text.find("I1_P1_s2,mse,-0.5,external,,\n") < text.find("I1_P1_s2,vpsnr,inf"));
  CHECK(text.find("I1_P1_s2,vpsnr,inf") < text.find("I2_P1_s2,vpsnr,31.25"));

  const ScoresTable back = read_scores_csv(path);
  REQUIRE(back.zone_count == 2);
  REQUIRE(back.rows.size() == 3);
  CHECK(back.rows[0].metric_id == "mse");
  CHECK(back.rows[0].provenance == "external");
  CHECK_FALSE(back.rows[0].zone_mse[0].has_value());
  CHECK(back.rows[1].score == kInf);
  CHECK(back.rows[1].zone_mse[1] == 0.5);
  CHECK(back.rows[2].score == 31.25);
  CHECK(back.rows[2].zone_mse[0] == 12.5);
  CHECK_FALSE(back.rows[2].zone_mse[1].has_value());
}

TEST_CASE("scores csv rejects malformed tables") {
  test::TempDir dir;
  ScoresTable dup;
  dup.zone_count = 0;
  dup.rows.push_back({"a", "mse", 1.0, "computed", {}});
  dup.rows.push_back({"a", "mse", 2.0, "computed", {}});
  CHECK_THROWS_AS(write_scores_csv(dup, dir.str("d.csv")), std::runtime_error);

  ScoresTable wrong;
  wrong.zone_count = 3;
  wrong.rows.push_back({"a", "mse", 1.0, "computed", {1.0}});
  CHECK_THROWS_AS(write_scores_csv(wrong, dir.str("w.csv")), std::runtime_error);

  atomic_write_file(dir.str("h.csv"), "foo,bar\n");
  CHECK_THROWS_AS(read_scores_csv(dir.str("h.csv")), std::runtime_error);
  atomic_write_file(dir.str("z.csv"), "stimulus_id,metric_id,score,provenance,zonk_1\n");
  CHECK_THROWS_AS(read_scores_csv(dir.str("z.csv")), std::runtime_error);
  atomic_write_file(dir.str("n.csv"),
                    "stimulus_id,metric_id,score,provenance\na,mse,not_a_number,computed\n");
  CHECK_THROWS_AS(read_scores_csv(dir.str("n.csv")), std::runtime_error);
}

TEST_CASE("mos csv round-trip") {
  test::TempDir dir;
  const std::map<std::string, double> mos{{"I1_P1_s2", 3.5}, {"I1_P5_s6", 1.25}};
  write_mos_csv(mos, dir.str("mos.csv"));
  CHECK(read_mos_csv(dir.str("mos.csv")) == mos);

  atomic_write_file(dir.str("dup.csv"), "stimulus_id,mos\na,3\na,4\n");
  CHECK_THROWS_AS(read_mos_csv(dir.str("dup.csv")), std::runtime_error);
  atomic_write_file(dir.str("bad.csv"), "id,score\na,3\n");
  CHECK_THROWS_AS(read_mos_csv(dir.str("bad.csv")), std::runtime_error);
}

TEST_CASE("stimulus index round-trip") {
  test::TempDir dir;
  std::vector<StimulusIndexRow> rows;
  rows.push_back({{"I2_P5_s1", "I2", "P5", Scenario::S2, 1.0, 5.0}, "stimuli/I2_P5_s1.ppm"});
  rows.push_back({{"I1_P2_s12", "I1", "P2", Scenario::S1, 12.0, 2.5}, "stimuli/I1_P2_s12.ppm"});
  const std::string path = dir.str("stimuli.csv");
  write_stimulus_index(rows, path);

  const std::string text = read_text_file(path);
  CHECK(text.rfind("stimulus_id,source_id,pattern_id,scenario,sigma,belt_width_deg,path\n", 0) ==
        0);

  const auto back = read_stimulus_index(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].record.stimulus_id == "I1_P2_s12");
  CHECK(back[0].record.scenario == Scenario::S1);
  CHECK(back[0].record.sigma == 12.0);
  CHECK(back[0].record.belt_width_deg == 2.5);
  CHECK(back[1].record.source_id == "I2");
  CHECK(back[1].path == "stimuli/I2_P5_s1.ppm");
}

TEST_CASE("fit csv layout") {
  test::TempDir dir;
  FitRow zwf{"zwf", "all", {}};
  zwf.fit.params.beta = {1, 2, 3, 4, 5};
  zwf.fit.weights = ZoneWeights{{0.728, 0.088, 0.088, 0.048, 0.048}};
  zwf.fit.pcc = 0.97;
  zwf.fit.rmse = 0.25;
  FitRow plain{"vpsnr", "all", {}};
  plain.fit.params.beta = {0.5, 0, 0, 1, 0};
  const std::string path = dir.str("fit.csv");
  write_fit_csv({zwf, plain}, 5, path);

  const std::string text = read_text_file(path);
  CHECK(text.rfind("metric,group,beta1,beta2,beta3,beta4,beta5,w1,w2,w3,w4,w5,pcc,rmse\n", 0) ==
        0);
  // Sorted by metric; fits without weights leave the weight cells empty.
  const auto vpsnr_at = text.find("\nvpsnr,");
  const auto zwf_at = text.find("\nzwf,");
  REQUIRE(vpsnr_at != std::string::npos);
  REQUIRE(zwf_at != std::string::npos);
  CHECK(vpsnr_at < zwf_at);
  CHECK(text.find("vpsnr,all,0.5,0,0,1,0,,,,,,0,0") != std::string::npos);
  CHECK(text.find("zwf,all,1,2,3,4,5,0.728,0.088,0.088,0.048,0.048,0.97,0.25") !=
        std::string::npos);
}

TEST_CASE("manifest loads and counts the planned database") {
  test::TempDir dir;
  save_pnm(test::noise_image(32, 16, 1, 1), dir.str("pano.pgm"));

  SUBCASE("full default grid") {
    atomic_write_file(dir.str("m.json"), manifest_with_sources(8, "pano.pgm"));
    const Manifest m = load_manifest(dir.str("m.json"));
    CHECK(m.sources.size() == 8);
    CHECK(m.pattern_ids.size() == 8);
    CHECK(m.planned_stimuli() == 256);
    CHECK(m.display.viewport_width_mm == doctest::Approx(1280 * 0.04375));
    CHECK(m.fov_h_deg == 96.0);
    CHECK(m.fov_v_deg == 0.0);
    CHECK(m.zones.zone_count() == 5);
    CHECK(m.belt_width_deg == 5.0);
    CHECK(m.out_dir == "out");
    CHECK(m.sources[2].yaw_deg == 80.0);

    const ViewportSpec spec = m.viewport_spec(m.sources[0]);
    CHECK(spec.out_width == 1280);
    CHECK(spec.fov_h_deg == 96.0);
  }
  SUBCASE("restricted grid") {
    const std::string extra = ",\n  \"patterns\": [\"P1\", \"P5\"],\n"
                              "  \"sigmas\": {\"S1\": [2], \"S2\": [1, 4]},\n"
                              "  \"belt_width_deg\": 0,\n  \"kernel_extent\": 12,\n"
                              "  \"out_dir\": \"run1\",\n  \"seed\": 77";
    atomic_write_file(dir.str("m.json"), manifest_with_sources(1, "pano.pgm", extra));
    const Manifest m = load_manifest(dir.str("m.json"));
    CHECK(m.planned_stimuli() == 3);
    CHECK(m.belt_width_deg == 0.0);
    CHECK(m.kernel_extent == 12);
    CHECK(m.out_dir == "run1");
    CHECK(m.seed == 77);
  }
  SUBCASE("explicit physical size and mos csv") {
    write_mos_csv({{"I1_P1_s2", 3.0}}, dir.str("mos.csv"));
    const std::string extra = ",\n  \"mos_csv\": \"mos.csv\"";
    std::string text = manifest_with_sources(1, "pano.pgm", extra);
    const std::string pitch = "\"pixel_pitch_mm\": 0.04375";
    text.replace(text.find(pitch), pitch.size(),
                 "\"viewport_width_mm\": 56.0,\n    \"viewport_height_mm\": 63.0");
    atomic_write_file(dir.str("m.json"), text);
    const Manifest m = load_manifest(dir.str("m.json"));
    CHECK(m.display.viewport_width_mm == 56.0);
    CHECK(read_mos_csv(m.mos_csv).at("I1_P1_s2") == 3.0);
  }
}

TEST_CASE("manifest validation") {
  test::TempDir dir;
  save_pnm(test::noise_image(32, 16, 1, 1), dir.str("pano.pgm"));
  const auto load_text = [&](const std::string& text) {
    atomic_write_file(dir.str("m.json"), text);
    return load_manifest(dir.str("m.json"));
  };

  SUBCASE("not json") {
    CHECK_THROWS_AS(load_text("not json"), ValidationError);
    CHECK_THROWS_AS(load_manifest(dir.str("absent.json")), ValidationError);
  }
  SUBCASE("missing geometry field") {
    std::string text = manifest_with_sources(1, "pano.pgm");
    const std::string line = "    \"focal_length_mm\": 62.0,\n";
    text.erase(text.find(line), line.size());
    const std::string msg = message_of([&] { load_text(text); });
    CHECK(msg.find("geometry.focal_length_mm") != std::string::npos);
  }
  SUBCASE("pitch and physical size are exclusive") {
    std::string text = manifest_with_sources(1, "pano.pgm");
    const std::string pitch = "\"pixel_pitch_mm\": 0.04375";
    text.replace(text.find(pitch), pitch.size(),
                 pitch + ",\n    \"viewport_width_mm\": 56.0, \"viewport_height_mm\": 63.0");
    CHECK_THROWS_AS(load_text(text), ValidationError);

    std::string none = manifest_with_sources(1, "pano.pgm");
    const std::string full = ",\n    \"pixel_pitch_mm\": 0.04375";
    none.erase(none.find(full), full.size());
    CHECK_THROWS_AS(load_text(none), ValidationError);
  }
  SUBCASE("duplicate source id names the id") {
    std::string text = manifest_with_sources(2, "pano.pgm");
    std::string msg;
    const auto pos = text.find("\"I2\"");
    text.replace(pos, 4, "\"I1\"");
    msg = message_of([&] { load_text(text); });
    CHECK(msg.find("duplicate source id 'I1'") != std::string::npos);
  }
  SUBCASE("source path must exist") {
    CHECK_THROWS_AS(load_text(manifest_with_sources(1, "nope.pgm")), ValidationError);
  }
  SUBCASE("source id charset") {
    std::string text = manifest_with_sources(1, "pano.pgm");
    text.replace(text.find("\"I1\""), 4, "\"I 1\"");
    CHECK_THROWS_AS(load_text(text), ValidationError);
  }
  SUBCASE("pitch_deg range") {
    std::string text = manifest_with_sources(1, "pano.pgm");
    text.replace(text.find("\"yaw_deg\": 0.000000"), 19, "\"pitch_deg\": 95.0000");
    CHECK_THROWS_AS(load_text(text), ValidationError);
  }
  SUBCASE("unknown or duplicate pattern") {
    CHECK_THROWS_AS(
        load_text(manifest_with_sources(1, "pano.pgm", ",\n  \"patterns\": [\"P9\"]")),
        ValidationError);
    CHECK_THROWS_AS(
        load_text(manifest_with_sources(1, "pano.pgm", ",\n  \"patterns\": [\"P1\", \"P1\"]")),
        ValidationError);
  }
  SUBCASE("duplicate sigma") {
    const std::string extra = ",\n  \"sigmas\": {\"S1\": [2, 2], \"S2\": [1]}";
    CHECK_THROWS_AS(load_text(manifest_with_sources(1, "pano.pgm", extra)), ValidationError);
  }
  SUBCASE("pattern without sigma grid") {
    const std::string extra = ",\n  \"sigmas\": {\"S1\": [2]}";
    const std::string msg =
        message_of([&] { load_text(manifest_with_sources(1, "pano.pgm", extra)); });
    CHECK(msg.find("sigma grid") != std::string::npos);
  }
  SUBCASE("zone edges must match the pattern length") {
    const std::string extra = ",\n  \"zones\": {\"edges_deg\": [0, 5, 10]}";
    CHECK_THROWS_AS(load_text(manifest_with_sources(1, "pano.pgm", extra)), ValidationError);
  }
  SUBCASE("zone edges must start at zero") {
    const std::string extra = ",\n  \"zones\": {\"edges_deg\": [1, 2, 3, 4, 5]}";
    CHECK_THROWS_AS(load_text(manifest_with_sources(1, "pano.pgm", extra)), ValidationError);
  }
  SUBCASE("fov bounds") {
    std::string text = manifest_with_sources(1, "pano.pgm");
    const std::string pitch = "\"pixel_pitch_mm\": 0.04375";
    text.replace(text.find(pitch), pitch.size(), pitch + ",\n    \"fov_h_deg\": 180.0");
    CHECK_THROWS_AS(load_text(text), ValidationError);
  }
  SUBCASE("negative belt") {
    CHECK_THROWS_AS(load_text(manifest_with_sources(1, "pano.pgm", ",\n  \"belt_width_deg\": -1")),
                    ValidationError);
  }
  SUBCASE("missing mos csv") {
    CHECK_THROWS_AS(
        load_text(manifest_with_sources(1, "pano.pgm", ",\n  \"mos_csv\": \"nope.csv\"")),
        ValidationError);
  }
}

TEST_CASE("scatter svg rendering") {
  ScatterPlot plot;
  plot.title = "vpsnr";
  plot.x_label = "score";
  plot.y_label = "MOS";
  plot.series.push_back({"S1 (center high)", {{30, 3.5}, {40, 4.2}, {25, 2.0}}});
  plot.series.push_back({"S2 (center low)", {{28, 2.5}, {35, 3.8}}});
  for (int i = 0; i <= 10; ++i)
    plot.curve.emplace_back(24.0 + i * 1.8, 2.0 + 0.2 * i);

  const std::string svg = render_scatter_svg(plot);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("S1 (center high)") != std::string::npos);
  CHECK(svg.find("S2 (center low)") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(render_scatter_svg(plot) == svg);

  // Non-finite points vanish without disturbing the rest of the plot.
  ScatterPlot padded = plot;
  padded.series[0].points.emplace_back(kInf, 3.0);
  padded.series[1].points.emplace_back(2.0, std::nan(""));
  CHECK(render_scatter_svg(padded) == svg);
}

TEST_SUITE_END();
