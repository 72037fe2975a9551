#include "fovqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fft.hpp"
#include "fovqa/dwt.hpp"

namespace fovqa {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

void require_same_dims(const Image& ref, const Image& dist, const char* op) {
  if (!ref.same_dims(dist)) throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

void require_map_dims(const Image& img, const Map& m, const char* op) {
  if (img.width != m.width || img.height != m.height)
    throw std::invalid_argument(std::string(op) + ": weight map does not match image dimensions");
}

double map_bilinear(const Map& m, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(m.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(m.height - 1));
  const int x0 = std::min(static_cast<int>(x), m.width - 2 >= 0 ? m.width - 2 : 0);
  const int y0 = std::min(static_cast<int>(y), m.height - 2 >= 0 ? m.height - 2 : 0);
  const int x1 = std::min(x0 + 1, m.width - 1);
  const int y1 = std::min(y0 + 1, m.height - 1);
  const double fx = x - x0, fy = y - y0;
  return (1 - fy) * ((1 - fx) * m.at(x0, y0) + fx * m.at(x1, y0)) +
         fy * ((1 - fx) * m.at(x0, y1) + fx * m.at(x1, y1));
}

}  // namespace

Map luminance(const Image& img) {
  Map out(img.width, img.height);
  if (img.channels == 1) {
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = img.data[i];
  } else if (img.channels == 3) {
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        out.at(x, y) =
            0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
  } else {
    throw std::invalid_argument("luminance: expected 1 or 3 channels");
  }
  return out;
}

double score_mse(const Image& ref, const Image& dist) {
  require_same_dims(ref, dist, "score_mse");
  const Map a = luminance(ref), b = luminance(dist);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.data.size());
}

double score_vpsnr(const Image& ref, const Image& dist) {
  const double mse = score_mse(ref, dist);
  if (mse == 0.0) return kInf;
  const double max = ref.max_value();
  return 10.0 * std::log10(max * max / mse);
}

namespace {

std::vector<double> ssim_window_kernel() {
  const int radius = 5;
  const double sigma = 1.5;
  std::vector<double> k(11);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable valid-mode filtering: output is (w-taps+1) x (h-taps+1).
Map filter_valid(const Map& m, const std::vector<double>& kernel) {
  const int taps = static_cast<int>(kernel.size());
  const int ow = m.width - taps + 1, oh = m.height - taps + 1;
  Map horz(ow, m.height);
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = 0; t < taps; ++t) acc += kernel[static_cast<std::size_t>(t)] * m.at(x + t, y);
      horz.at(x, y) = acc;
    }
  }
  Map out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = 0; t < taps; ++t)
        acc += kernel[static_cast<std::size_t>(t)] * horz.at(x, y + t);
      out.at(x, y) = acc;
    }
  }
  return out;
}

inline double stabilized_ratio(double num, double den, double c) {
  if (c == 0.0 && den == 0.0) return 1.0;  // uqi rule: 0/0 is perfect agreement
  return (num + c) / (den + c);
}

}  // namespace

SsimMeans ssim_window_means(const Map& ref, const Map& dist, double max_value, bool uqi_mode) {
  if (ref.width != dist.width || ref.height != dist.height)
    throw std::invalid_argument("ssim: dimension mismatch");
  if (ref.width < 11 || ref.height < 11)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  const auto kernel = ssim_window_kernel();
  Map xx(ref.width, ref.height), yy(ref.width, ref.height), xy(ref.width, ref.height);
  for (std::size_t i = 0; i < ref.data.size(); ++i) {
    xx.data[i] = ref.data[i] * ref.data[i];
    yy.data[i] = dist.data[i] * dist.data[i];
    xy.data[i] = ref.data[i] * dist.data[i];
  }
  const Map mu_x = filter_valid(ref, kernel);
  const Map mu_y = filter_valid(dist, kernel);
  const Map e_xx = filter_valid(xx, kernel);
  const Map e_yy = filter_valid(yy, kernel);
  const Map e_xy = filter_valid(xy, kernel);

  const double c1 = uqi_mode ? 0.0 : 0.01 * 0.01 * max_value * max_value;
  const double c2 = uqi_mode ? 0.0 : 0.03 * 0.03 * max_value * max_value;

  double ssim_acc = 0.0, cs_acc = 0.0;
  for (std::size_t i = 0; i < mu_x.data.size(); ++i) {
    const double mx = mu_x.data[i], my = mu_y.data[i];
    const double vx = std::max(0.0, e_xx.data[i] - mx * mx);
    const double vy = std::max(0.0, e_yy.data[i] - my * my);
    const double cov = e_xy.data[i] - mx * my;
    const double lum = stabilized_ratio(2.0 * mx * my, mx * mx + my * my, c1);
    const double cs = stabilized_ratio(2.0 * cov, vx + vy, c2);
    ssim_acc += lum * cs;
    cs_acc += cs;
  }
  const double n = static_cast<double>(mu_x.data.size());
  return {ssim_acc / n, cs_acc / n};
}

double score_ssim(const Image& ref, const Image& dist, bool uqi_mode) {
  require_same_dims(ref, dist, "score_ssim");
  return ssim_window_means(luminance(ref), luminance(dist), ref.max_value(), uqi_mode).ssim;
}

Map downsample2(const Map& m) {
  const int w = m.width / 2, h = m.height / 2;
  if (w < 1 || h < 1) throw std::invalid_argument("downsample2: image too small");
  Map out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.at(x, y) = 0.25 * (m.at(2 * x, 2 * y) + m.at(2 * x + 1, 2 * y) +
                             m.at(2 * x, 2 * y + 1) + m.at(2 * x + 1, 2 * y + 1));
  return out;
}

MsssimTerms msssim_scale_terms(const Image& ref, const Image& dist) {
  require_same_dims(ref, dist, "score_msssim");
  int w = ref.width, h = ref.height;
  for (int k = 1; k < 5; ++k) {
    w /= 2;
    h /= 2;
  }
  if (w < 11 || h < 11)
    throw std::invalid_argument("score_msssim: image too small for 5 dyadic scales");

  Map a = luminance(ref), b = luminance(dist);
  const double max = ref.max_value();
  MsssimTerms terms{};
  for (int k = 0; k < 5; ++k) {
    const SsimMeans means = ssim_window_means(a, b, max);
    terms.cs[static_cast<std::size_t>(k)] = means.cs;
    if (k == 4) {
      terms.coarsest_ssim = means.ssim;
    } else {
      a = downsample2(a);
      b = downsample2(b);
    }
  }
  return terms;
}

const std::array<double, 5>& msssim_exponents() {
  static const std::array<double, 5> exponents = [] {
    std::array<double, 5> e{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
    const double sum = std::accumulate(e.begin(), e.end(), 0.0);
    for (auto& v : e) v /= sum;
    return e;
  }();
  return exponents;
}

double score_msssim(const Image& ref, const Image& dist) {
  const MsssimTerms terms = msssim_scale_terms(ref, dist);
  const auto& g = msssim_exponents();
  double score = 1.0;
  // Clamp to zero before the fractional power so a (rare) negative
  // contrast-structure mean cannot produce NaN.
  for (int k = 0; k < 4; ++k)
    score *= std::pow(std::max(0.0, terms.cs[static_cast<std::size_t>(k)]),
                      g[static_cast<std::size_t>(k)]);
  score *= std::pow(std::max(0.0, terms.coarsest_ssim), g[4]);
  return score;
}

double csf_mannos_sakrison(double f_cpd) {
  const double f = std::abs(f_cpd);
  return 2.6 * (0.0192 + 0.114 * f) * std::exp(-std::pow(0.114 * f, 1.1));
}

namespace {

// CSF gain per DFT bin; bin frequencies are signed cycles/pixel converted to
// cycles/degree through the per-axis angular pitch.
std::vector<double> csf_bin_gains(int w, int h, const VirtualGeometry& vg) {
  const auto [dpp_x, dpp_y] = degrees_per_pixel(vg);
  std::vector<double> gains(static_cast<std::size_t>(w) * h);
  for (int v = 0; v < h; ++v) {
    const double fv = (v <= h / 2 ? v : v - h) / (static_cast<double>(h) * dpp_y);
    for (int u = 0; u < w; ++u) {
      const double fu = (u <= w / 2 ? u : u - w) / (static_cast<double>(w) * dpp_x);
      gains[static_cast<std::size_t>(v) * w + u] = csf_mannos_sakrison(std::hypot(fu, fv));
    }
  }
  return gains;
}

std::vector<double> map_to_vector(const Map& m) { return m.data; }

}  // namespace

double score_wsnr(const Image& ref, const Image& dist, const VirtualGeometry& vg) {
  require_same_dims(ref, dist, "score_wsnr");
  const Map s = luminance(ref), d = luminance(dist);
  std::vector<double> err(s.data.size());
  for (std::size_t i = 0; i < err.size(); ++i) err[i] = s.data[i] - d.data[i];

  const auto spec_s = fft::dft2(map_to_vector(s), s.width, s.height);
  const auto spec_e = fft::dft2(err, s.width, s.height);
  const auto gains = csf_bin_gains(s.width, s.height, vg);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const double a2 = gains[i] * gains[i];
    num += std::norm(spec_s[i]) * a2;
    den += std::norm(spec_e[i]) * a2;
  }
  if (den == 0.0) return kInf;
  return 10.0 * std::log10(num / den);
}

FoveationModel FoveationModel::from_geometry(const VirtualGeometry& vg) {
  FoveationModel fm;
  const auto [dpp_x, dpp_y] = degrees_per_pixel(vg);
  fm.display_nyquist_cpd = 1.0 / (dpp_x + dpp_y);  // 1 / (2 * mean angular pitch)
  return fm;
}

void FoveationModel::validate() const {
  if (alpha <= 0 || e2_halfres_deg <= 0 || ct0 <= 0 || display_nyquist_cpd <= 0)
    throw std::invalid_argument("foveation model: parameters must be positive");
  if (ct0 >= 1) throw std::invalid_argument("foveation model: ct0 must be below 1");
}

double cutoff_frequency_cpd(double ecc_deg, const FoveationModel& fm) {
  if (ecc_deg < 0) throw std::domain_error("cutoff frequency: eccentricity must be >= 0");
  const double fc = fm.e2_halfres_deg * std::log(1.0 / fm.ct0) /
                    (fm.alpha * (ecc_deg + fm.e2_halfres_deg));
  return std::min(fc, fm.display_nyquist_cpd);
}

double foveal_weight(double ecc_deg, const FoveationModel& fm) {
  if (ecc_deg < 0) throw std::domain_error("foveal weight: eccentricity must be >= 0");
  return fm.e2_halfres_deg / (ecc_deg + fm.e2_halfres_deg);
}

Map foveal_weight_map(const EccentricityMap& em, const FoveationModel& fm) {
  Map out(em.deg.width, em.deg.height);
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = foveal_weight(em.deg.data[i], fm);
  return out;
}

double score_fpsnr(const Image& ref, const Image& dist, const Map& weight_map) {
  require_same_dims(ref, dist, "score_fpsnr");
  require_map_dims(ref, weight_map, "score_fpsnr");
  const Map a = luminance(ref), b = luminance(dist);
  double num = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    num += weight_map.data[i] * d * d;
    wsum += weight_map.data[i];
  }
  if (wsum == 0.0) throw std::invalid_argument("score_fpsnr: weight map has zero mass");
  const double fmse = num / wsum;
  if (fmse == 0.0) return kInf;
  const double max = ref.max_value();
  return 10.0 * std::log10(max * max / fmse);
}

double score_fwsnr(const Image& ref, const Image& dist, const Map& weight_map,
                   const VirtualGeometry& vg) {
  require_same_dims(ref, dist, "score_fwsnr");
  require_map_dims(ref, weight_map, "score_fwsnr");
  const Map s = luminance(ref), d = luminance(dist);
  std::vector<double> err(s.data.size());
  for (std::size_t i = 0; i < err.size(); ++i) err[i] = s.data[i] - d.data[i];

  auto spec_s = fft::dft2(map_to_vector(s), s.width, s.height);
  auto spec_e = fft::dft2(err, s.width, s.height);
  const auto gains = csf_bin_gains(s.width, s.height, vg);
  for (std::size_t i = 0; i < gains.size(); ++i) {
    spec_s[i] *= gains[i];
    spec_e[i] *= gains[i];
  }
  const auto filt_s = fft::idft2(spec_s, s.width, s.height);
  const auto filt_e = fft::idft2(spec_e, s.width, s.height);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    num += weight_map.data[i] * filt_s[i] * filt_s[i];
    den += weight_map.data[i] * filt_e[i] * filt_e[i];
  }
  if (den == 0.0) return kInf;
  return 10.0 * std::log10(num / den);
}

Map ssim_block_map(const Image& ref, const Image& dist) {
  require_same_dims(ref, dist, "score_fssim");
  if (ref.width < 8 || ref.height < 8)
    throw std::invalid_argument("score_fssim: image smaller than the 8x8 block");
  const Map a = luminance(ref), b = luminance(dist);
  const double max = ref.max_value();
  const double c1 = 0.01 * 0.01 * max * max;
  const double c2 = 0.03 * 0.03 * max * max;

  Map blocks(ref.width / 8, ref.height / 8);
  for (int by = 0; by < blocks.height; ++by) {
    for (int bx = 0; bx < blocks.width; ++bx) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int y = 8 * by; y < 8 * by + 8; ++y) {
        for (int x = 8 * bx; x < 8 * bx + 8; ++x) {
          const double u = a.at(x, y), v = b.at(x, y);
          sx += u;
          sy += v;
          sxx += u * u;
          syy += v * v;
          sxy += u * v;
        }
      }
      const double n = 64.0;
      const double mx = sx / n, my = sy / n;
      const double vx = std::max(0.0, sxx / n - mx * mx);
      const double vy = std::max(0.0, syy / n - my * my);
      const double cov = sxy / n - mx * my;
      blocks.at(bx, by) = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                          ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  }
  return blocks;
}

double score_fssim(const Image& ref, const Image& dist, const Map& weight_map) {
  require_map_dims(ref, weight_map, "score_fssim");
  const Map blocks = ssim_block_map(ref, dist);
  double num = 0.0, wsum = 0.0;
  for (int by = 0; by < blocks.height; ++by) {
    for (int bx = 0; bx < blocks.width; ++bx) {
      const double w = map_bilinear(weight_map, 8 * bx + 3.5, 8 * by + 3.5);
      num += w * blocks.at(bx, by);
      wsum += w;
    }
  }
  if (wsum == 0.0) throw std::invalid_argument("score_fssim: weight map has zero mass");
  return num / wsum;
}

namespace {

constexpr int kFwqiLevels = 4;

// Center frequency of a subband in cycles/pixel: a level-l detail band spans
// (1/2^(l+1), 1/2^l), the residual approximation spans (0, 1/2^(L+1)).
double subband_center_freq_cpp(int level, bool is_detail) {
  if (is_detail) return 3.0 / std::pow(2.0, level + 2);
  return 0.5 / std::pow(2.0, level + 1);
}

}  // namespace

double score_fwqi(const Image& ref, const Image& dist, const Map& weight_map,
                  const VirtualGeometry& vg) {
  require_same_dims(ref, dist, "score_fwqi");
  require_map_dims(ref, weight_map, "score_fwqi");

  const Map a = reflect_pad_to_multiple(luminance(ref), 1 << kFwqiLevels);
  const Map b = reflect_pad_to_multiple(luminance(dist), 1 << kFwqiLevels);
  const HaarSubbands sa = haar_dwt2(a, kFwqiLevels);
  const HaarSubbands sb = haar_dwt2(b, kFwqiLevels);

  const auto [dpp_x, dpp_y] = degrees_per_pixel(vg);
  const double dpp_mean = 0.5 * (dpp_x + dpp_y);

  double num = 0.0, den = 0.0;
  auto accumulate = [&](const Map& cr, const Map& cd, int level, bool is_detail) {
    const double gain = csf_mannos_sakrison(subband_center_freq_cpp(level, is_detail) / dpp_mean);
    const double support = std::pow(2.0, level);
    for (int j = 0; j < cr.height; ++j) {
      for (int i = 0; i < cr.width; ++i) {
        const double cx = (i + 0.5) * support - 0.5;
        const double cy = (j + 0.5) * support - 0.5;
        const double w = gain * map_bilinear(weight_map, cx, cy);
        const double d = cr.at(i, j) - cd.at(i, j);
        num += w * d * d;
        den += w * cr.at(i, j) * cr.at(i, j);
      }
    }
  };
  for (int l = 0; l < kFwqiLevels; ++l) {
    const auto& da = sa.details[static_cast<std::size_t>(l)];
    const auto& db = sb.details[static_cast<std::size_t>(l)];
    accumulate(da.hl, db.hl, l + 1, true);
    accumulate(da.lh, db.lh, l + 1, true);
    accumulate(da.hh, db.hh, l + 1, true);
  }
  accumulate(sa.ll, sb.ll, kFwqiLevels, false);

  if (den == 0.0) throw std::domain_error("score_fwqi: reference carries no weighted energy");
  const double nwe = std::sqrt(num / den);
  return 1.0 / (1.0 + nwe);
}

const std::vector<std::string>& metric_ids() {
  static const std::vector<std::string> ids = {"mse",   "vpsnr", "ssim",  "uqi",   "msssim",
                                               "wsnr",  "fpsnr", "fwsnr", "fssim", "fwqi"};
  return ids;
}

double score_metric(const std::string& metric_id, const Image& ref, const Image& dist,
                    const MetricContext& ctx) {
  if (metric_id == "mse") return score_mse(ref, dist);
  if (metric_id == "vpsnr") return score_vpsnr(ref, dist);
  if (metric_id == "ssim") return score_ssim(ref, dist);
  if (metric_id == "uqi") return score_ssim(ref, dist, true);
  if (metric_id == "msssim") return score_msssim(ref, dist);
  if (metric_id == "wsnr") return score_wsnr(ref, dist, ctx.vg);
  if (metric_id == "fpsnr") return score_fpsnr(ref, dist, ctx.foveal_weights);
  if (metric_id == "fwsnr") return score_fwsnr(ref, dist, ctx.foveal_weights, ctx.vg);
  if (metric_id == "fssim") return score_fssim(ref, dist, ctx.foveal_weights);
  if (metric_id == "fwqi") return score_fwqi(ref, dist, ctx.foveal_weights, ctx.vg);
  throw std::invalid_argument("unknown metric id: " + metric_id);
}

}  // namespace fovqa
