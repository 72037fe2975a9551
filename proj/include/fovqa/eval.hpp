#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fovqa/zwf.hpp"

namespace fovqa {

struct LogisticParams {
  // y = b1*(1/2 - 1/(1 + exp(b2*(x - b3)))) + b4*x + b5
  std::array<double, 5> beta{0, 0, 0, 0, 0};
};

// Saturates the sigmoid term for large |b2*(x - b3)| instead of overflowing.
double logistic5(double x, const LogisticParams& p);

double pcc(const std::vector<double>& a, const std::vector<double>& b);
double rmse(const std::vector<double>& pred, const std::vector<double>& obs);

struct FitResult {
  LogisticParams params;
  std::optional<ZoneWeights> weights;
  double pcc = 0.0;
  double rmse = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Least-squares fit of logistic5 to (x, y): damped Gauss-Newton from a
// data-driven initialization plus 8 seeded random restarts; converges when
// the relative objective change drops below 1e-10 (or at 2000 iterations).
// Parameters are not asserted identifiable, only the fitted curve. The
// optional trace receives the objective after every accepted step of the
// initial start, which is non-increasing by construction.
FitResult fit_logistic(const std::vector<double>& x, const std::vector<double>& y,
                       std::uint64_t seed = 0, std::vector<double>* objective_trace = nullptr);

// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::vector<double> v);

// Jointly fits logistic parameters and simplex-constrained zone weights to
// minimize sum((logistic5(zwf(zm_i, w)) - mos_i)^2), alternating a logistic
// step with projected gradient steps on w, from a uniform start plus 8
// seeded random simplex starts. Stimuli whose zone MSEs are all zero are
// excluded (their ZWF is infinite).
FitResult fit_zone_weights(const std::vector<ZoneMseVector>& zone_mses,
                           const std::vector<double>& mos, std::uint64_t seed = 0,
                           double max_value = 255.0);

// fit_logistic preceded by dropping non-finite scores (with their MOS
// partners); pcc/rmse relate the mapped scores to MOS.
FitResult evaluate_metric(const std::vector<double>& scores, const std::vector<double>& mos,
                          std::uint64_t seed = 0);

struct SubjectiveRecord {
  std::string stimulus_id;
  std::vector<int> raw_scores;
  double mos = 0.0;
  double ci95 = 0.0;  // 95% half-width, Student-t
};

// Mean of 1..5 grades with t_{0.975, n-1} * s / sqrt(n) half-width; n >= 2.
SubjectiveRecord mos_with_ci(const std::vector<int>& raw_scores);

}  // namespace fovqa
