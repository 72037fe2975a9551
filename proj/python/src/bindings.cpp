#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fovqa/eval.hpp"
#include "fovqa/geometry.hpp"
#include "fovqa/image.hpp"
#include "fovqa/manifest.hpp"
#include "fovqa/metrics.hpp"
#include "fovqa/pipeline.hpp"
#include "fovqa/projection.hpp"
#include "fovqa/stimulus.hpp"
#include "fovqa/zwf.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using fovqa::Image;
using fovqa::Map;
using fovqa::ZoneMap;

// Rasters cross the boundary as copies: (h, w) or (h, w, c) arrays in,
// fresh arrays out. No views into C++ storage are ever handed to python.
Image image_from_numpy(const py::array& array, int bit_depth) {
  if (bit_depth < 1 || bit_depth > 16) {
    throw std::invalid_argument("bit_depth must be in [1, 16]");
  }
  auto arr = py::array_t<float, py::array::c_style | py::array::forcecast>::ensure(array);
  if (!arr || (arr.ndim() != 2 && arr.ndim() != 3)) {
    throw std::invalid_argument("expected a numeric array of shape (h, w) or (h, w, c)");
  }
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  const int c = arr.ndim() == 3 ? static_cast<int>(arr.shape(2)) : 1;
  if (w < 1 || h < 1 || c < 1) throw std::invalid_argument("array dimensions must be positive");
  Image img(w, h, c, bit_depth);
  std::memcpy(img.data.data(), arr.data(), img.data.size() * sizeof(float));
  return img;
}

py::array image_to_numpy(const Image& img) {
  std::vector<py::ssize_t> shape{img.height, img.width};
  if (img.channels > 1) shape.push_back(img.channels);
  py::array_t<float> arr(shape);
  std::memcpy(arr.mutable_data(), img.data.data(), img.data.size() * sizeof(float));
  return arr;
}

Map map_from_numpy(const py::array& array) {
  auto arr = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(array);
  if (!arr || arr.ndim() != 2) {
    throw std::invalid_argument("expected a numeric array of shape (h, w)");
  }
  Map m(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
  std::memcpy(m.data.data(), arr.data(), m.data.size() * sizeof(double));
  return m;
}

py::array_t<double> map_to_numpy(const Map& m) {
  py::array_t<double> arr({m.height, m.width});
  std::memcpy(arr.mutable_data(), m.data.data(), m.data.size() * sizeof(double));
  return arr;
}

py::array_t<int> zone_map_to_numpy(const ZoneMap& zm) {
  py::array_t<int> arr({zm.height, zm.width});
  std::memcpy(arr.mutable_data(), zm.zones.data(), zm.zones.size() * sizeof(int));
  return arr;
}

fovqa::MetricContext make_context(const fovqa::VirtualGeometry& vg, std::optional<double> fx,
                                  std::optional<double> fy) {
  const double x = fx ? *fx : (vg.width_px - 1) / 2.0;
  const double y = fy ? *fy : (vg.height_px - 1) / 2.0;
  fovqa::MetricContext ctx;
  ctx.vg = vg;
  ctx.foveal_weights =
      fovqa::foveal_weight_map(fovqa::eccentricity_map(vg, x, y),
                               fovqa::FoveationModel::from_geometry(vg));
  return ctx;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  using namespace fovqa;
  using release = py::call_guard<py::gil_scoped_release>;

  m.doc() = "Foveation-aware quality assessment for omnidirectional images";
  m.attr("__version__") = "0.1.0";

  // ---- rasters ----------------------------------------------------------

  py::class_<Image>(m, "Image")
      .def(py::init<int, int, int, int>(), "width"_a, "height"_a, "channels"_a = 1,
           "bit_depth"_a = 8)
      .def_readonly("width", &Image::width)
      .def_readonly("height", &Image::height)
      .def_readonly("channels", &Image::channels)
      .def_readonly("bit_depth", &Image::bit_depth)
      .def("max_value", &Image::max_value)
      .def("to_numpy", &image_to_numpy, "Copy out as float32, shape (h, w) or (h, w, c).")
      .def_static("from_numpy", &image_from_numpy, "array"_a, "bit_depth"_a = 8,
                  "Copy in from any numeric array of shape (h, w) or (h, w, c).");

  py::class_<Map>(m, "Map")
      .def(py::init<int, int, double>(), "width"_a, "height"_a, "fill"_a = 0.0)
      .def_readonly("width", &Map::width)
      .def_readonly("height", &Map::height)
      .def("to_numpy", &map_to_numpy, "Copy out as float64, shape (h, w).")
      .def_static("from_numpy", &map_from_numpy, "array"_a);

  py::class_<ZoneMap>(m, "ZoneMap")
      .def_readonly("width", &ZoneMap::width)
      .def_readonly("height", &ZoneMap::height)
      .def("to_numpy", &zone_map_to_numpy, "Copy out as int32 zone indices, shape (h, w).");

  m.def("quantize", &quantize, "img"_a, release(),
        "Round to the integer pixel grid and clamp to [0, 2^bit_depth - 1].");
  m.def("load_pnm", &load_pnm, "path"_a);
  m.def("save_pnm", &save_pnm, "img"_a, "path"_a);
  m.def("load_pfm", &load_pfm, "path"_a);
  m.def("save_pfm", &save_pfm, "map"_a, "path"_a);
  m.def("save_zone_map", &save_zone_map, "zone_map"_a, "path"_a);

  // ---- geometry ---------------------------------------------------------

  py::class_<DisplayGeometry>(m, "DisplayGeometry")
      .def(py::init([](double focal_length_mm, double lens_to_display_mm, double lens_to_eye_mm,
                       int viewport_width_px, int viewport_height_px, double viewport_width_mm,
                       double viewport_height_mm) {
             DisplayGeometry d;
             d.focal_length_mm = focal_length_mm;
             d.lens_to_display_mm = lens_to_display_mm;
             d.lens_to_eye_mm = lens_to_eye_mm;
             d.viewport_width_px = viewport_width_px;
             d.viewport_height_px = viewport_height_px;
             d.viewport_width_mm = viewport_width_mm;
             d.viewport_height_mm = viewport_height_mm;
             return d;
           }),
           "focal_length_mm"_a = 62.0, "lens_to_display_mm"_a = 25.0, "lens_to_eye_mm"_a = 10.0,
           "viewport_width_px"_a = 1280, "viewport_height_px"_a = 1440,
           "viewport_width_mm"_a = 0.0, "viewport_height_mm"_a = 0.0)
      .def_readwrite("focal_length_mm", &DisplayGeometry::focal_length_mm)
      .def_readwrite("lens_to_display_mm", &DisplayGeometry::lens_to_display_mm)
      .def_readwrite("lens_to_eye_mm", &DisplayGeometry::lens_to_eye_mm)
      .def_readwrite("viewport_width_px", &DisplayGeometry::viewport_width_px)
      .def_readwrite("viewport_height_px", &DisplayGeometry::viewport_height_px)
      .def_readwrite("viewport_width_mm", &DisplayGeometry::viewport_width_mm)
      .def_readwrite("viewport_height_mm", &DisplayGeometry::viewport_height_mm)
      .def("validate", &DisplayGeometry::validate);

  py::class_<VirtualGeometry>(m, "VirtualGeometry")
      .def_readonly("lens_to_virtual_mm", &VirtualGeometry::lens_to_virtual_mm)
      .def_readonly("eye_to_virtual_mm", &VirtualGeometry::eye_to_virtual_mm)
      .def_readonly("width_px", &VirtualGeometry::width_px)
      .def_readonly("height_px", &VirtualGeometry::height_px)
      .def_readonly("width_mm", &VirtualGeometry::width_mm)
      .def_readonly("height_mm", &VirtualGeometry::height_mm)
      .def_readonly("magnification", &VirtualGeometry::magnification)
      .def("pitch_x_mm", &VirtualGeometry::pitch_x_mm)
      .def("pitch_y_mm", &VirtualGeometry::pitch_y_mm);

  m.def("derive_virtual_geometry", &derive_virtual_geometry, "display"_a);
  m.def("square_pixel_pitch_mm", &square_pixel_pitch_mm, "diagonal_mm"_a, "width_px"_a,
        "height_px"_a);
  m.def("degrees_per_pixel", &degrees_per_pixel, "vg"_a,
        "Per-axis visual angle of one virtual-viewport pixel, degrees.");

  py::class_<ZoneScheme>(m, "ZoneScheme")
      .def(py::init([](std::vector<double> edges_deg) {
             ZoneScheme s;
             s.edges_deg = std::move(edges_deg);
             return s;
           }),
           "edges_deg"_a = std::vector<double>{0.0, 2.5, 4.0, 9.0, 30.0})
      .def_readwrite("edges_deg", &ZoneScheme::edges_deg)
      .def("zone_count", &ZoneScheme::zone_count)
      .def("validate", &ZoneScheme::validate);

  py::class_<EccentricityMap>(m, "EccentricityMap")
      .def_readonly("deg", &EccentricityMap::deg)
      .def_readonly("foveation_x_px", &EccentricityMap::foveation_x_px)
      .def_readonly("foveation_y_px", &EccentricityMap::foveation_y_px);

  m.def("eccentricity_at", &eccentricity_at, "x_px"_a, "y_px"_a, "foveation_x_px"_a,
        "foveation_y_px"_a, "vg"_a);
  m.def("eccentricity_map", &eccentricity_map, "vg"_a, "foveation_x_px"_a, "foveation_y_px"_a,
        release());
  m.def("zone_of", &zone_of, "ecc_deg"_a, "scheme"_a);
  m.def("zone_map", &zone_map, "em"_a, "scheme"_a, release());
  m.def("zone_pixel_counts", &zone_pixel_counts, "zone_map"_a, "zone_count"_a, release());

  // ---- projection -------------------------------------------------------

  py::class_<ViewportSpec>(m, "ViewportSpec")
      .def(py::init([](double yaw_deg, double pitch_deg, double fov_h_deg, double fov_v_deg,
                       int out_width, int out_height) {
             ViewportSpec s;
             s.yaw_deg = yaw_deg;
             s.pitch_deg = pitch_deg;
             s.fov_h_deg = fov_h_deg;
             s.fov_v_deg = fov_v_deg;
             s.out_width = out_width;
             s.out_height = out_height;
             return s;
           }),
           "yaw_deg"_a = 0.0, "pitch_deg"_a = 0.0, "fov_h_deg"_a = 96.0, "fov_v_deg"_a = 0.0,
           "out_width"_a = 0, "out_height"_a = 0)
      .def_readwrite("yaw_deg", &ViewportSpec::yaw_deg)
      .def_readwrite("pitch_deg", &ViewportSpec::pitch_deg)
      .def_readwrite("fov_h_deg", &ViewportSpec::fov_h_deg)
      .def_readwrite("fov_v_deg", &ViewportSpec::fov_v_deg)
      .def_readwrite("out_width", &ViewportSpec::out_width)
      .def_readwrite("out_height", &ViewportSpec::out_height)
      .def("effective_fov_v", &ViewportSpec::effective_fov_v)
      .def("validate", &ViewportSpec::validate);

  m.def("validate_equirect", &validate_equirect, "img"_a);
  m.def("viewport_ray_to_equirect", &viewport_ray_to_equirect, "u_px"_a, "v_px"_a, "spec"_a,
        "equirect_width"_a, "equirect_height"_a);
  m.def("bilinear_sample", &bilinear_sample, "img"_a, "x"_a, "y"_a, "channel"_a = 0);
  m.def("extract_viewport", &extract_viewport, "equirect"_a, "spec"_a, release());

  // ---- stimuli ----------------------------------------------------------

  py::enum_<Scenario>(m, "Scenario").value("S1", Scenario::S1).value("S2", Scenario::S2);

  py::class_<QualityPattern>(m, "QualityPattern")
      .def_readonly("id", &QualityPattern::id)
      .def_readonly("scenario", &QualityPattern::scenario)
      .def_readonly("hq", &QualityPattern::hq);

  m.def("standard_patterns", [] { return standard_patterns(); });
  m.def("quality_pattern", &quality_pattern, "id"_a);
  m.def("stimulus_id", &stimulus_id, "source_id"_a, "pattern_id"_a, "sigma"_a);

  py::class_<StimulusSpec>(m, "StimulusSpec")
      .def(py::init([](std::string source_id, const QualityPattern& pattern, double sigma,
                       int kernel_extent, double belt_width_deg) {
             StimulusSpec s;
             s.source_id = std::move(source_id);
             s.pattern = pattern;
             s.sigma = sigma;
             s.kernel_extent = kernel_extent;
             s.belt_width_deg = belt_width_deg;
             return s;
           }),
           "source_id"_a, "pattern"_a, "sigma"_a = 2.0, "kernel_extent"_a = 50,
           "belt_width_deg"_a = 5.0)
      .def_readwrite("source_id", &StimulusSpec::source_id)
      .def_readwrite("pattern", &StimulusSpec::pattern)
      .def_readwrite("sigma", &StimulusSpec::sigma)
      .def_readwrite("kernel_extent", &StimulusSpec::kernel_extent)
      .def_readwrite("belt_width_deg", &StimulusSpec::belt_width_deg);

  m.def("gaussian_kernel", &gaussian_kernel, "sigma"_a, "kernel_extent"_a);
  m.def("gaussian_blur", &gaussian_blur, "img"_a, "sigma"_a, "kernel_extent"_a = 50, release());
  m.def("blend_weight_map", &blend_weight_map, "pattern"_a, "em"_a, "scheme"_a,
        "belt_width_deg"_a, release());
  m.def("generate_stimulus", &generate_stimulus, "source"_a, "spec"_a, "em"_a, "scheme"_a,
        release());

  // ---- metrics ----------------------------------------------------------

  m.def("luminance", &luminance, "img"_a, release());
  m.def("score_mse", &score_mse, "ref"_a, "dist"_a, release());
  m.def("score_vpsnr", &score_vpsnr, "ref"_a, "dist"_a, release());
  m.def("score_ssim", &score_ssim, "ref"_a, "dist"_a, "uqi_mode"_a = false, release());
  m.def("score_msssim", &score_msssim, "ref"_a, "dist"_a, release());
  m.def("csf_mannos_sakrison", &csf_mannos_sakrison, "f_cpd"_a);
  m.def("score_wsnr", &score_wsnr, "ref"_a, "dist"_a, "vg"_a, release());

  py::class_<FoveationModel>(m, "FoveationModel")
      .def_readwrite("alpha", &FoveationModel::alpha)
      .def_readwrite("e2_halfres_deg", &FoveationModel::e2_halfres_deg)
      .def_readwrite("ct0", &FoveationModel::ct0)
      .def_readwrite("display_nyquist_cpd", &FoveationModel::display_nyquist_cpd)
      .def_static("from_geometry", &FoveationModel::from_geometry, "vg"_a)
      .def("validate", &FoveationModel::validate);

  m.def("cutoff_frequency_cpd", &cutoff_frequency_cpd, "ecc_deg"_a, "fm"_a);
  m.def("foveal_weight", &foveal_weight, "ecc_deg"_a, "fm"_a);
  m.def("foveal_weight_map", &foveal_weight_map, "em"_a, "fm"_a, release());
  m.def("score_fpsnr", &score_fpsnr, "ref"_a, "dist"_a, "weight_map"_a, release());
  m.def("score_fwsnr", &score_fwsnr, "ref"_a, "dist"_a, "weight_map"_a, "vg"_a, release());
  m.def("score_fssim", &score_fssim, "ref"_a, "dist"_a, "weight_map"_a, release());
  m.def("score_fwqi", &score_fwqi, "ref"_a, "dist"_a, "weight_map"_a, "vg"_a, release());

  py::class_<MetricContext>(m, "MetricContext")
      .def(py::init(&make_context), "vg"_a, "foveation_x_px"_a = std::nullopt,
           "foveation_y_px"_a = std::nullopt,
           "Foveation defaults to the raster center; the foveal weight map is derived from vg.")
      .def(py::init([](const VirtualGeometry& vg, const Map& foveal_weights) {
             MetricContext ctx;
             ctx.vg = vg;
             ctx.foveal_weights = foveal_weights;
             return ctx;
           }),
           "vg"_a, "foveal_weights"_a)
      .def_readonly("vg", &MetricContext::vg)
      .def_readonly("foveal_weights", &MetricContext::foveal_weights);

  m.def("metric_ids", [] { return metric_ids(); });
  m.def("score_metric", &score_metric, "metric_id"_a, "ref"_a, "dist"_a, "ctx"_a, release());

  // ---- zone-weighted foveation score -------------------------------------

  py::class_<ZoneMseVector>(m, "ZoneMseVector")
      .def_readonly("mse", &ZoneMseVector::mse)
      .def_readonly("pixel_count", &ZoneMseVector::pixel_count)
      .def("zone_count", &ZoneMseVector::zone_count)
      .def("present", &ZoneMseVector::present, "k"_a);

  py::class_<ZoneWeights>(m, "ZoneWeights")
      .def(py::init([](std::vector<double> w) {
             ZoneWeights zw;
             zw.w = std::move(w);
             return zw;
           }),
           "w"_a)
      .def_readwrite("w", &ZoneWeights::w)
      .def("zone_count", &ZoneWeights::zone_count)
      .def("validate", &ZoneWeights::validate);

  m.def("zone_mse", &zone_mse, "ref"_a, "dist"_a, "zone_map"_a, release());
  m.def("zwf_score", &zwf_score, "zone_mses"_a, "weights"_a, "max_value"_a = 255.0);

  // ---- evaluation -------------------------------------------------------

  py::class_<LogisticParams>(m, "LogisticParams")
      .def(py::init<>())
      .def(py::init([](std::array<double, 5> beta) {
             LogisticParams p;
             p.beta = beta;
             return p;
           }),
           "beta"_a)
      .def_readwrite("beta", &LogisticParams::beta);

  m.def("logistic5", &logistic5, "x"_a, "params"_a);
  m.def("pcc", &pcc, "a"_a, "b"_a);
  m.def("rmse", &rmse, "pred"_a, "obs"_a);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("params", &FitResult::params)
      .def_readonly("weights", &FitResult::weights)
      .def_readonly("pcc", &FitResult::pcc)
      .def_readonly("rmse", &FitResult::rmse)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged);

  m.def(
      "fit_logistic",
      [](const std::vector<double>& x, const std::vector<double>& y, std::uint64_t seed) {
        return fit_logistic(x, y, seed);
      },
      "x"_a, "y"_a, "seed"_a = 0, release());
  m.def("project_to_simplex", &project_to_simplex, "v"_a);
  m.def("fit_zone_weights", &fit_zone_weights, "zone_mses"_a, "mos"_a, "seed"_a = 0,
        "max_value"_a = 255.0, release());
  m.def("evaluate_metric", &evaluate_metric, "scores"_a, "mos"_a, "seed"_a = 0, release());

  py::class_<SubjectiveRecord>(m, "SubjectiveRecord")
      .def_readonly("stimulus_id", &SubjectiveRecord::stimulus_id)
      .def_readonly("raw_scores", &SubjectiveRecord::raw_scores)
      .def_readonly("mos", &SubjectiveRecord::mos)
      .def_readonly("ci95", &SubjectiveRecord::ci95);

  m.def("mos_with_ci", &mos_with_ci, "raw_scores"_a);

  // ---- pipeline ---------------------------------------------------------

  m.def("pipeline_commands", [] { return pipeline_commands(); });
  m.def(
      "run",
      [](const std::string& manifest_path, const std::string& command, int jobs,
         std::optional<std::uint64_t> seed, const std::string& out_dir,
         const std::vector<std::string>& metrics, const std::string& group_by) {
        const Manifest manifest = load_manifest(manifest_path);
        PipelineOptions options;
        options.jobs = jobs;
        options.seed = seed;
        options.out_dir = out_dir;
        options.metrics = metrics;
        options.group_by = group_by;
        std::ostringstream log;
        run_pipeline(manifest, command, options, log);
        return log.str();
      },
      "manifest_path"_a, "command"_a, py::kw_only(), "jobs"_a = 1, "seed"_a = std::nullopt,
      "out_dir"_a = std::string(), "metrics"_a = std::vector<std::string>{},
      "group_by"_a = std::string(), release(),
      "Run one pipeline stage against a manifest; returns the stage summary text.");
}
