#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfou/inference.hpp"

namespace mfou::ldp {

/// Replications of the estimation pipeline; degenerate paths are dropped and
/// counted. Records come back in rep_id order whatever the thread count.
struct ReplicationBatch {
  std::vector<EstimateRecord> records;
  std::size_t degenerate = 0;
};

ReplicationBatch simulate_estimates(const EstimationPipeline& pipeline, std::uint64_t seed, std::size_t reps,
                                    unsigned threads, std::optional<double> drift = {});

struct LogMeanExp {
  double value = 0.0;      // log((1/n) Σ e^{x_i})
  double ess = 0.0;        // (Σw)² / Σw²
  double top_share = 0.0;  // largest w_i / Σw
};

/// Max-shifted log-mean-exp.
LogMeanExp log_mean_exp(std::span<const double> x);

struct CgfEstimate {
  double value = 0.0;
  double std_error = 0.0;  // bootstrap
  double ess = 0.0;
  double top_share = 0.0;
  bool heavy_tail = false;  // top replication carries > 50% of the mass
  bool unreliable = false;  // ESS < 100
  std::size_t reps = 0;
};

inline constexpr double kHeavyTailShare = 0.5;
inline constexpr double kMinReliableEss = 100.0;

/// (1/T) log mean exp(a ∫Q dZ + b ∫Q² d⟨M⟩) over the records.
CgfEstimate empirical_cgf(std::span<const EstimateRecord> records, double a, double b, double horizon,
                          std::uint64_t bootstrap_seed, std::size_t resamples = 200);

/// log Λ_φ(T) for a transformed path. Throws DegeneratePath.
double girsanov_log_weight(double phi, double theta, const TransformedPath& tp, const QVTable& qv);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean of Λ_φ(T) over paths simulated with drift θ.
MeanEstimate doleans_mean(std::span<const EstimateRecord> records, double phi, double theta);

struct TailEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   // 95%
  double ci_high = 0.0;
  std::size_t hits = 0;
  std::size_t reps = 0;
  double ess = 0.0;
  bool tilted = false;
  double simulation_drift = 0.0;
};

/// Plain Monte Carlo P(θ̂ > threshold) (or < when !upper) with the exact
/// Clopper–Pearson interval.
TailEstimate tail_probability(std::span<const EstimateRecord> records, double threshold, bool upper = true);

/// Same probability under drift θ from paths simulated with drift −φ:
/// mean of 1{event}·Λ_φ⁻¹, normal-approximation interval.
TailEstimate tail_probability_tilted(std::span<const EstimateRecord> records, double theta, double phi,
                                     double threshold, bool upper = true);

/// Exact binomial (Clopper–Pearson) interval at the given confidence.
std::pair<double, double> clopper_pearson(std::size_t hits, std::size_t reps, double confidence = 0.95);

}  // namespace mfou::ldp
