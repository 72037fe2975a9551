#include "fovqa/eval.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fovqa {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double stable_inv_logit(double t) {
  // 1/(1 + e^t) without overflow for large |t|.
  if (t >= 0) {
    const double z = std::exp(-t);
    return z / (1.0 + z);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

// Portable uniform in [0,1): implementation-defined distributions are
// avoided so seeds reproduce across standard libraries.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(seed * 0x9e3779b97f4a7c15ULL + stream + 1);
}

// ---- damped Gauss-Newton on the 5-parameter logistic ----

double sse_of(const std::vector<double>& x, const std::vector<double>& y,
              const LogisticParams& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = logistic5(x[i], p) - y[i];
    acc += r * r;
  }
  return acc;
}

// Solves a 5x5 system in place; returns false on a vanishing pivot.
bool solve5(std::array<std::array<double, 5>, 5> a, std::array<double, 5> b,
            std::array<double, 5>& out) {
  for (int col = 0; col < 5; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 5; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 5; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 4; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < 5; ++c) acc -= a[r][c] * out[c];
    out[r] = acc / a[r][r];
  }
  return true;
}

struct LmOutcome {
  LogisticParams params;
  double sse = kInf;
  int iterations = 0;
  bool converged = false;
};

LmOutcome lm_fit(const std::vector<double>& x, const std::vector<double>& y,
                 const LogisticParams& init, std::vector<double>* trace) {
  LmOutcome out;
  out.params = init;
  out.sse = sse_of(x, y, out.params);
  if (trace) trace->push_back(out.sse);
  double lambda = 1e-3;

  for (int iter = 0; iter < 2000; ++iter) {
    const auto& b = out.params.beta;
    std::array<std::array<double, 5>, 5> jtj{};
    std::array<double, 5> jtr{};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = b[1] * (x[i] - b[2]);
      const double q = stable_inv_logit(t);
      const double r = (b[0] * (0.5 - q) + b[3] * x[i] + b[4]) - y[i];
      const std::array<double, 5> j = {0.5 - q, b[0] * q * (1.0 - q) * (x[i] - b[2]),
                                       -b[0] * q * (1.0 - q) * b[1], x[i], 1.0};
      for (int r_ = 0; r_ < 5; ++r_) {
        jtr[r_] += j[static_cast<std::size_t>(r_)] * r;
        for (int c = r_; c < 5; ++c)
          jtj[r_][c] += j[static_cast<std::size_t>(r_)] * j[static_cast<std::size_t>(c)];
      }
    }
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < r; ++c) jtj[r][c] = jtj[c][r];

    bool accepted = false;
    LogisticParams candidate;
    double candidate_sse = 0.0;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      auto damped = jtj;
      for (int k = 0; k < 5; ++k) damped[k][k] += lambda * std::max(jtj[k][k], 1e-12);
      std::array<double, 5> step{};
      std::array<double, 5> rhs{};
      for (int k = 0; k < 5; ++k) rhs[k] = -jtr[k];
      if (!solve5(damped, rhs, step)) {
        lambda *= 10.0;
        continue;
      }
      candidate = out.params;
      for (int k = 0; k < 5; ++k) candidate.beta[static_cast<std::size_t>(k)] += step[k];
      candidate_sse = sse_of(x, y, candidate);
      if (std::isfinite(candidate_sse) && candidate_sse <= out.sse) {
        accepted = true;
        lambda = std::max(lambda / 3.0, 1e-12);
      } else {
        lambda *= 10.0;
      }
    }
    out.iterations = iter + 1;
    if (!accepted) {
      out.converged = true;  // no damping level improves the objective
      break;
    }
    const double drop = out.sse - candidate_sse;
    out.params = candidate;
    out.sse = candidate_sse;
    if (trace) trace->push_back(out.sse);
    if (drop <= 1e-10 * std::max(out.sse, 1e-300)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

LogisticParams pinned_init(const std::vector<double>& x, const std::vector<double>& y) {
  LogisticParams p;
  const double sd = stddev_of(x);
  const auto [y_min, y_max] = std::minmax_element(y.begin(), y.end());
  p.beta = {*y_max - *y_min, sd > 0 ? 4.0 / sd : 0.0, median_of(x), 0.0, mean_of(y)};
  return p;
}

LogisticParams random_init(const std::vector<double>& x, const std::vector<double>& y,
                           std::mt19937_64& rng) {
  const auto [x_min, x_max] = std::minmax_element(x.begin(), x.end());
  const auto [y_min, y_max] = std::minmax_element(y.begin(), y.end());
  const double range_x = std::max(*x_max - *x_min, 1e-9);
  const double range_y = *y_max - *y_min;
  const double sd = stddev_of(x);
  const double b2_scale = sd > 0 ? 4.0 / sd : 1.0;

  LogisticParams p;
  p.beta[0] = range_y * (0.5 + 1.5 * u01(rng)) * (u01(rng) < 0.5 ? -1.0 : 1.0);
  p.beta[1] = b2_scale * std::pow(10.0, 2.0 * u01(rng) - 1.0) * (u01(rng) < 0.5 ? -1.0 : 1.0);
  p.beta[2] = *x_min + range_x * u01(rng);
  p.beta[3] = (2.0 * u01(rng) - 1.0) * range_y / range_x;
  p.beta[4] = mean_of(y) + range_y * (u01(rng) - 0.5);
  return p;
}

// pcc filled as 0 when either series is constant; the standalone pcc()
// operation still reports that case as an error.
void fill_fit_quality(FitResult& fit, const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pred(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pred[i] = logistic5(x[i], fit.params);
  fit.rmse = rmse(pred, y);
  try {
    fit.pcc = pcc(pred, y);
  } catch (const std::domain_error&) {
    fit.pcc = 0.0;
  }
}

constexpr int kRestarts = 8;

}  // namespace

double logistic5(double x, const LogisticParams& p) {
  const auto& b = p.beta;
  return b[0] * (0.5 - stable_inv_logit(b[1] * (x - b[2]))) + b[3] * x + b[4];
}

double pcc(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pcc: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("pcc: need at least 2 points");
  const double ma = mean_of(a), mb = mean_of(b);
  double saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0)
    throw std::domain_error("pcc: undefined for a zero-variance series");
  return sab / std::sqrt(saa * sbb);
}

double rmse(const std::vector<double>& pred, const std::vector<double>& obs) {
  if (pred.size() != obs.size()) throw std::invalid_argument("rmse: length mismatch");
  if (pred.empty()) throw std::invalid_argument("rmse: need at least 1 point");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    acc += (pred[i] - obs[i]) * (pred[i] - obs[i]);
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

FitResult fit_logistic(const std::vector<double>& x, const std::vector<double>& y,
                       std::uint64_t seed, std::vector<double>* objective_trace) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_logistic: length mismatch");
  if (x.size() < 5) throw std::invalid_argument("fit_logistic: need at least 5 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("fit_logistic: non-finite input");

  LmOutcome best = lm_fit(x, y, pinned_init(x, y), objective_trace);
  for (int r = 0; r < kRestarts; ++r) {
    auto rng = seeded_rng(seed, static_cast<std::uint64_t>(r));
    const LmOutcome run = lm_fit(x, y, random_init(x, y, rng), nullptr);
    if (run.sse < best.sse) best = run;
  }

  FitResult fit;
  fit.params = best.params;
  fit.iterations = best.iterations;
  fit.converged = best.converged;
  fill_fit_quality(fit, x, y);
  return fit;
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("project_to_simplex: empty vector");
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0) theta = candidate;
  }
  for (auto& w : v) w = std::max(w - theta, 0.0);
  return v;
}

namespace {

// ---- alternating logistic / simplex-weight fit ----

struct WeightProblem {
  std::vector<std::vector<double>> mse;  // [stimulus][zone]
  std::vector<double> mos;
  double max_value;

  std::vector<double> zwf_scores(const std::vector<double>& w) const {
    std::vector<double> x(mse.size());
    for (std::size_t i = 0; i < mse.size(); ++i) {
      double q = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) q += w[k] * mse[i][k];
      x[i] = q > 0 ? 10.0 * std::log10(max_value * max_value / q) : kInf;
    }
    return x;
  }

  double objective(const std::vector<double>& w, const LogisticParams& p) const {
    const auto x = zwf_scores(w);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(x[i])) return kInf;
      const double r = logistic5(x[i], p) - mos[i];
      acc += r * r;
    }
    return acc;
  }

  std::vector<double> gradient(const std::vector<double>& w, const LogisticParams& p) const {
    const auto& b = p.beta;
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t i = 0; i < mse.size(); ++i) {
      double q = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) q += w[k] * mse[i][k];
      const double x = 10.0 * std::log10(max_value * max_value / q);
      const double s = stable_inv_logit(b[1] * (x - b[2]));
      const double dy_dx = b[0] * s * (1.0 - s) * b[1] + b[3];
      const double r = logistic5(x, p) - mos[i];
      const double dx_dq = -10.0 / (q * std::log(10.0));
      const double common = 2.0 * r * dy_dx * dx_dq;
      for (std::size_t k = 0; k < w.size(); ++k) g[k] += common * mse[i][k];
    }
    return g;
  }
};

struct AlternatingOutcome {
  std::vector<double> w;
  LogisticParams params;
  double sse = kInf;
  int rounds = 0;
  bool converged = false;
};

AlternatingOutcome alternate_fit(const WeightProblem& prob, std::vector<double> w,
                                 std::uint64_t seed) {
  AlternatingOutcome out;
  LogisticParams beta = pinned_init(prob.zwf_scores(w), prob.mos);
  double sse = kInf;

  for (int round = 0; round < 80; ++round) {
    out.rounds = round + 1;
    const auto x = prob.zwf_scores(w);
    // Full multistart on the first round, cheap warm start afterwards.
    if (round == 0) {
      LmOutcome best = lm_fit(x, prob.mos, pinned_init(x, prob.mos), nullptr);
      for (int r = 0; r < kRestarts; ++r) {
        auto rng = seeded_rng(seed, 100 + static_cast<std::uint64_t>(r));
        const LmOutcome run = lm_fit(x, prob.mos, random_init(x, prob.mos, rng), nullptr);
        if (run.sse < best.sse) best = run;
      }
      beta = best.params;
    } else {
      beta = lm_fit(x, prob.mos, beta, nullptr).params;
    }

    double eta = 1.0;
    for (int step = 0; step < 200; ++step) {
      const double f0 = prob.objective(w, beta);
      const auto g = prob.gradient(w, beta);
      std::vector<double> candidate(w.size());
      bool moved = false;
      while (eta > 1e-18) {
        for (std::size_t k = 0; k < w.size(); ++k) candidate[k] = w[k] - eta * g[k];
        candidate = project_to_simplex(std::move(candidate));
        if (prob.objective(candidate, beta) < f0) {
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
      w = candidate;
      eta *= 1.3;
    }

    const double now = prob.objective(w, beta);
    if (std::isfinite(sse) && sse - now <= 1e-12 * std::max(sse, 1e-300)) {
      out.converged = true;
      sse = std::min(sse, now);
      break;
    }
    sse = now;
  }
  out.w = std::move(w);
  out.params = beta;
  out.sse = sse;
  return out;
}

}  // namespace

FitResult fit_zone_weights(const std::vector<ZoneMseVector>& zone_mses,
                           const std::vector<double>& mos, std::uint64_t seed, double max_value) {
  if (zone_mses.size() != mos.size())
    throw std::invalid_argument("fit_zone_weights: length mismatch");
  if (zone_mses.empty()) throw std::invalid_argument("fit_zone_weights: no stimuli");
  const int zones = zone_mses.front().zone_count();
  for (const auto& zm : zone_mses)
    if (zm.zone_count() != zones)
      throw std::invalid_argument("fit_zone_weights: inconsistent zone counts");

  WeightProblem prob;
  prob.max_value = max_value;
  for (std::size_t i = 0; i < zone_mses.size(); ++i) {
    if (!std::isfinite(mos[i])) throw std::invalid_argument("fit_zone_weights: non-finite MOS");
    double total = 0.0;
    for (int k = 0; k < zones; ++k) {
      if (!zone_mses[i].present(k))
        throw std::invalid_argument("fit_zone_weights: zone " + std::to_string(k + 1) +
                                    " is absent from a stimulus; weights are not fittable");
      total += zone_mses[i].mse[static_cast<std::size_t>(k)];
    }
    if (total == 0.0) continue;  // infinite ZWF for every weight choice
    prob.mse.push_back(zone_mses[i].mse);
    prob.mos.push_back(mos[i]);
  }
  if (prob.mse.size() < static_cast<std::size_t>(zones) + 5)
    throw std::invalid_argument("fit_zone_weights: need at least K+5 finite stimuli");

  bool all_identical = true;
  for (std::size_t i = 1; i < prob.mse.size() && all_identical; ++i)
    for (int k = 0; k < zones; ++k)
      if (prob.mse[i][static_cast<std::size_t>(k)] != prob.mse[0][static_cast<std::size_t>(k)]) {
        all_identical = false;
        break;
      }
  if (all_identical)
    throw std::domain_error(
        "fit_zone_weights: every stimulus has the same zone-MSE vector; weights are not "
        "identifiable");

  AlternatingOutcome best;
  for (int start = 0; start <= kRestarts; ++start) {
    std::vector<double> w(static_cast<std::size_t>(zones),
                          1.0 / static_cast<double>(zones));
    if (start > 0) {
      auto rng = seeded_rng(seed, 200 + static_cast<std::uint64_t>(start));
      double sum = 0.0;
      for (auto& v : w) {
        v = -std::log(std::max(u01(rng), 1e-300));
        sum += v;
      }
      for (auto& v : w) v /= sum;
    }
    AlternatingOutcome run = alternate_fit(prob, std::move(w), seed + static_cast<std::uint64_t>(start) * 1315423911ULL);
    if (run.sse < best.sse) best = std::move(run);
  }

  FitResult fit;
  fit.params = best.params;
  fit.weights = ZoneWeights{best.w};
  fit.weights->validate();
  fit.iterations = best.rounds;
  fit.converged = best.converged;
  fill_fit_quality(fit, prob.zwf_scores(best.w), prob.mos);
  return fit;
}

FitResult evaluate_metric(const std::vector<double>& scores, const std::vector<double>& mos,
                          std::uint64_t seed) {
  if (scores.size() != mos.size()) throw std::invalid_argument("evaluate_metric: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) continue;
    x.push_back(scores[i]);
    y.push_back(mos[i]);
  }
  return fit_logistic(x, y, seed);
}

SubjectiveRecord mos_with_ci(const std::vector<int>& raw_scores) {
  const std::size_t n = raw_scores.size();
  if (n < 2) throw std::invalid_argument("mos_with_ci: need at least 2 scores");
  double sum = 0.0;
  for (int s : raw_scores) {
    if (s < 1 || s > 5) throw std::invalid_argument("mos_with_ci: grades must be in 1..5");
    sum += s;
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (int s : raw_scores) ss += (s - mean) * (s - mean);
  const double sample_sd = std::sqrt(ss / static_cast<double>(n - 1));

  SubjectiveRecord rec;
  rec.raw_scores = raw_scores;
  rec.mos = mean;
  if (sample_sd > 0) {
    const boost::math::students_t_distribution<double> dist(static_cast<double>(n - 1));
    rec.ci95 = boost::math::quantile(dist, 0.975) * sample_sd / std::sqrt(static_cast<double>(n));
  }
  return rec;
}

}  // namespace fovqa
