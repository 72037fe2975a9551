#pragma once

#include <array>
#include <string>
#include <vector>

#include "fovqa/geometry.hpp"
#include "fovqa/image.hpp"

namespace fovqa {

// All metrics operate on the luminance plane (Rec.601) and treat the image
// max value (255 for 8-bit) as the dynamic range. Perfect reconstruction
// yields the metric's maximal value: +inf for the dB metrics, 1.0 otherwise.

// Rec.601 weights (0.299, 0.587, 0.114); single-channel input passes through.
Map luminance(const Image& img);

double score_mse(const Image& ref, const Image& dist);
double score_vpsnr(const Image& ref, const Image& dist);

// Mean SSIM over an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// valid-placement windows only. uqi_mode drops both stabilizing constants
// and defines 0/0 factors as 1.
double score_ssim(const Image& ref, const Image& dist, bool uqi_mode = false);

// Window means of the full SSIM map and of the contrast-structure factor
// alone, on luminance planes. Building block for score_ssim and the
// multi-scale product.
struct SsimMeans {
  double ssim;
  double cs;
};
SsimMeans ssim_window_means(const Map& ref, const Map& dist, double max_value,
                            bool uqi_mode = false);

// 2x2 box average, decimated by 2; odd trailing rows/columns are dropped.
Map downsample2(const Map& m);

// Multi-scale SSIM over 5 dyadic scales: contrast-structure means at every
// scale plus the full SSIM mean at the coarsest scale.
struct MsssimTerms {
  std::array<double, 5> cs;
  double coarsest_ssim;
};
MsssimTerms msssim_scale_terms(const Image& ref, const Image& dist);

// Per-scale exponents (0.0448, 0.2856, 0.3001, 0.2363, 0.1333) rescaled to
// sum to exactly 1 so a common per-scale value v aggregates to v.
const std::array<double, 5>& msssim_exponents();

// prod(cs_k^g_k, k=1..4) * coarsest_ssim^g_5. Negative factors are clamped
// to 0 before the fractional power.
double score_msssim(const Image& ref, const Image& dist);

// Mannos-Sakrison contrast sensitivity, f in cycles/degree:
// A(f) = 2.6*(0.0192 + 0.114 f)*exp(-(0.114 f)^1.1).
double csf_mannos_sakrison(double f_cpd);

// SNR between CSF-weighted signal and error spectra:
// 10*log10(sum|S*A|^2 / sum|E*A|^2) over 2-D DFT bins, with bin frequencies
// converted to cycles/degree through the per-axis degrees-per-pixel of the
// virtual viewport. Zero error -> +inf.
double score_wsnr(const Image& ref, const Image& dist, const VirtualGeometry& vg);

// Cutoff-frequency model shared by the foveal metrics.
struct FoveationModel {
  double alpha = 0.106;
  double e2_halfres_deg = 2.3;
  double ct0 = 1.0 / 64.0;
  double display_nyquist_cpd;

  // Nyquist from the mean of the two axis sampling densities.
  static FoveationModel from_geometry(const VirtualGeometry& vg);
  void validate() const;
};

// f_c(e) = e2*ln(1/ct0) / (alpha*(e + e2)), clamped to the display Nyquist.
double cutoff_frequency_cpd(double ecc_deg, const FoveationModel& fm);

// w(e) = f_c(e)/f_c(0) before the Nyquist clamp = e2/(e + e2).
double foveal_weight(double ecc_deg, const FoveationModel& fm);
Map foveal_weight_map(const EccentricityMap& em, const FoveationModel& fm);

// FPSNR = 10*log10(MAX^2 / FMSE), FMSE = sum(w*d^2)/sum(w) on luminance.
double score_fpsnr(const Image& ref, const Image& dist, const Map& weight_map);

// CSF-filter signal and error through the DFT as in score_wsnr, then weight
// the filtered rasters spatially: 10*log10(sum(w*s~^2)/sum(w*e~^2)).
double score_fwsnr(const Image& ref, const Image& dist, const Map& weight_map,
                   const VirtualGeometry& vg);

// Plain-statistics SSIM per non-overlapping 8x8 block of the luminance
// planes; trailing partial blocks are dropped.
Map ssim_block_map(const Image& ref, const Image& dist);

// sum(w_b * SSIM_b) / sum(w_b) with w_b sampled bilinearly at each block's
// geometric center.
double score_fssim(const Image& ref, const Image& dist, const Map& weight_map);

// Orthonormal Haar decomposition (4 levels, reflect-padded to a multiple of
// 16); each coefficient weighted by the foveal weight at its spatial support
// center times the CSF gain at its subband's center frequency.
// NWE = sqrt(sum w*(c_r - c_d)^2 / sum w*c_r^2); FWQI = 1/(1 + NWE).
double score_fwqi(const Image& ref, const Image& dist, const Map& weight_map,
                  const VirtualGeometry& vg);

// Batch-facing registry.
struct MetricContext {
  VirtualGeometry vg;
  Map foveal_weights;
};
const std::vector<std::string>& metric_ids();
double score_metric(const std::string& metric_id, const Image& ref, const Image& dist,
                    const MetricContext& ctx);

}  // namespace fovqa
