#include "mfou/ldp/monte_carlo.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>

#include "mfou/error.hpp"
#include "mfou/ldp/analytic.hpp"
#include "mfou/numerics/parallel.hpp"
#include "mfou/numerics/random.hpp"

namespace mfou::ldp {

ReplicationBatch simulate_estimates(const EstimationPipeline& pipeline, std::uint64_t seed, std::size_t reps,
                                    unsigned threads, std::optional<double> drift) {
  std::vector<std::optional<EstimateRecord>> slots(reps);
  parallel_for(reps, threads, [&](std::size_t i) { slots[i] = pipeline.try_run(seed, i, drift); });
  ReplicationBatch batch;
  batch.records.reserve(reps);
  for (auto& s : slots) {
    if (s) {
      batch.records.push_back(*s);
    } else {
      ++batch.degenerate;
    }
  }
  return batch;
}

LogMeanExp log_mean_exp(std::span<const double> x) {
  LogMeanExp out;
  if (x.empty()) return out;
  const double top = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(top)) {
    out.value = top;
    return out;
  }
  double sum = 0.0, sum_sq = 0.0;
  for (double v : x) {
    const double w = std::exp(v - top);
    sum += w;
    sum_sq += w * w;
  }
  out.value = top + std::log(sum / static_cast<double>(x.size()));
  out.ess = sum * sum / sum_sq;
  out.top_share = 1.0 / sum;
  return out;
}

CgfEstimate empirical_cgf(std::span<const EstimateRecord> records, double a, double b, double horizon,
                          std::uint64_t bootstrap_seed, std::size_t resamples) {
  CgfEstimate out;
  out.reps = records.size();
  if (records.empty()) return out;
  if (a == 0.0 && b == 0.0) {
    out.ess = static_cast<double>(records.size());
    out.top_share = 1.0 / out.ess;
    return out;
  }
  std::vector<double> x(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    x[i] = a * records[i].numerator + b * records[i].denominator;
  }
  const LogMeanExp lme = log_mean_exp(x);
  out.value = lme.value / horizon;
  out.ess = lme.ess;
  out.top_share = lme.top_share;
  out.heavy_tail = lme.top_share > kHeavyTailShare;
  out.unreliable = lme.ess < kMinReliableEss;

  if (resamples > 1) {
    RandomStream rng(bootstrap_seed, 0);
    std::vector<double> draw(x.size()), stats(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
      for (auto& d : draw) d = x[rng() % x.size()];
      stats[r] = log_mean_exp(draw).value / horizon;
    }
    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= static_cast<double>(resamples);
    double var = 0.0;
    for (double s : stats) var += (s - mean) * (s - mean);
    out.std_error = std::sqrt(var / static_cast<double>(resamples - 1));
  }
  return out;
}

double girsanov_log_weight(double phi, double theta, const TransformedPath& tp, const QVTable& qv) {
  const auto [num, den] = sufficient_statistics(tp, qv);
  if (!(den > kDegenerateDenominator)) {
    throw Error(Errc::degenerate_path, "integral of Q^2 d<M> is degenerate");
  }
  return girsanov_log_weight(phi, theta, num, den);
}

MeanEstimate doleans_mean(std::span<const EstimateRecord> records, double phi, double theta) {
  MeanEstimate out;
  const double n = static_cast<double>(records.size());
  if (records.empty()) return out;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& r : records) {
    const double w = std::exp(girsanov_log_weight(phi, theta, r.numerator, r.denominator));
    sum += w;
    sum_sq += w * w;
  }
  out.mean = sum / n;
  out.std_error = std::sqrt(std::max(0.0, sum_sq / n - out.mean * out.mean) / std::max(1.0, n - 1.0));
  return out;
}

std::pair<double, double> clopper_pearson(std::size_t hits, std::size_t reps, double confidence) {
  if (reps == 0) return {0.0, 1.0};
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(hits), n = static_cast<double>(reps);
  const double lo = hits == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2);
  const double hi = hits == reps ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2);
  return {lo, hi};
}

namespace {

bool in_event(double theta_hat, double threshold, bool upper) {
  return upper ? theta_hat > threshold : theta_hat < threshold;
}

}  // namespace

TailEstimate tail_probability(std::span<const EstimateRecord> records, double threshold, bool upper) {
  TailEstimate out;
  out.reps = records.size();
  out.ess = static_cast<double>(records.size());
  if (records.empty()) return out;
  for (const auto& r : records) out.hits += in_event(r.theta_hat, threshold, upper) ? 1 : 0;
  const double n = static_cast<double>(out.reps);
  out.probability = static_cast<double>(out.hits) / n;
  out.std_error = std::sqrt(out.probability * (1.0 - out.probability) / n);
  std::tie(out.ci_low, out.ci_high) = clopper_pearson(out.hits, out.reps);
  return out;
}

TailEstimate tail_probability_tilted(std::span<const EstimateRecord> records, double theta, double phi,
                                     double threshold, bool upper) {
  TailEstimate out;
  out.tilted = true;
  out.simulation_drift = -phi;
  out.reps = records.size();
  if (records.empty()) return out;
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& r : records) {
    if (!in_event(r.theta_hat, threshold, upper)) continue;
    ++out.hits;
    const double w = std::exp(-girsanov_log_weight(phi, theta, r.numerator, r.denominator));
    sum += w;
    sum_sq += w * w;
  }
  const double n = static_cast<double>(out.reps);
  out.probability = sum / n;
  out.std_error = std::sqrt(std::max(0.0, sum_sq / n - out.probability * out.probability) / std::max(1.0, n - 1.0));
  out.ess = sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
  out.ci_low = std::max(0.0, out.probability - 1.96 * out.std_error);
  out.ci_high = out.probability + 1.96 * out.std_error;
  return out;
}

}  // namespace mfou::ldp
