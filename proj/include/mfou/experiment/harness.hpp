#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mfou/experiment/config.hpp"
#include "mfou/experiment/report.hpp"
#include "mfou/inference.hpp"
#include "mfou/ldp/analytic.hpp"
#include "mfou/ldp/monte_carlo.hpp"

namespace mfou::experiment {

/// Kernels keyed by (H, T, n), kept in memory and optionally on disk as
/// `kernel_H<H>_T<T>_n<n>_v<scheme>.bin`. Unreadable cache files are rebuilt.
class KernelCache {
 public:
  explicit KernelCache(std::optional<std::filesystem::path> dir = {});

  std::shared_ptr<const TransferKernel> get(const ProcessSpec& spec);
  std::filesystem::path file_for(const ProcessSpec& spec) const;
  std::size_t disk_hits() const noexcept { return disk_hits_; }
  std::size_t builds() const noexcept { return builds_; }

 private:
  std::optional<std::filesystem::path> dir_;
  std::map<std::tuple<double, double, std::size_t>, std::shared_ptr<const TransferKernel>> memory_;
  std::mutex guard_;
  std::size_t disk_hits_ = 0;
  std::size_t builds_ = 0;
};

struct RunContext {
  KernelCache* cache = nullptr;  // may be null: kernels are then built afresh
  std::ostream* log = nullptr;   // progress lines, may be null
};

/// Distinct master seed per experiment cell, derived from the config seed.
std::uint64_t cell_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);
std::uint64_t tag(std::string_view name);
std::uint64_t bits(double v);

/// sup |F_n − Φ(·/sd)|.
double ks_distance_normal(std::vector<double> samples, double sd);

struct LinearFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
};

/// Weighted least squares with known variances.
LinearFit weighted_fit(std::span<const double> x, std::span<const double> y, std::span<const double> variance);

/// inf over Γ = (x0, ∞) (upper) or (−∞, x0) of the printed rate function.
double printed_rate_infimum(double x0, TailSide side, double theta);
/// Same for the numeric rate function under a convention (+inf if unbounded).
double numeric_rate_infimum(double x0, TailSide side, double theta, ldp::SignConvention convention);

struct TailCell {
  double hurst, x0, horizon;
  std::size_t cells;
  ldp::TailEstimate estimate;
  std::size_t attempted = 0;
  std::size_t degenerate = 0;
};

struct TailFit {
  double hurst, x0;
  TailSide side;
  LinearFit raw;        // log p against T
  LinearFit corrected;  // log p + ½ log T against T
  double rate_printed, rate_numeric_printed, rate_numeric_chernoff;
  bool valid = true;
};

/// Tail probability cells over the horizons and the slope fit for one (H, x0).
std::pair<std::vector<TailCell>, TailFit> tail_study(const ExperimentConfig& config, double hurst, double x0,
                                                     const RunContext& ctx);

ExperimentReport run_normality(const ExperimentConfig& config, const RunContext& ctx = {});
ExperimentReport run_tail_slopes(const ExperimentConfig& config, const RunContext& ctx = {});
ExperimentReport run_cgf_convergence(const ExperimentConfig& config, const RunContext& ctx = {});
ExperimentReport run_h_invariance(const ExperimentConfig& config, const RunContext& ctx = {});

/// Dispatches on config.experiment.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunContext& ctx = {});

}  // namespace mfou::experiment
