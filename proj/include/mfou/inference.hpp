#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mfou/paths.hpp"
#include "mfou/transform.hpp"

namespace mfou {

/// Z_{t_j} = Σ_{i<j} g(s_i, t_j)(X_{i+1} − X_i).
std::vector<double> compute_Z(const PathBundle& path, const TransferKernel& kernel);

struct QRepresentation {
  std::vector<double> q;
  std::vector<double> v;  // V_t = ∫₀ᵗ ψ(s,s) dZ_s
};

/// Q_t = ½ ψ(t,t) Z_t + ½ V_t.
QRepresentation compute_Q(std::span<const double> z, const QVTable& qv);

/// Q_t = d/d⟨M⟩_t ∫₀ᵗ g(s,t) X_s ds, as the forward ratio
///   (N_{j+1} − N_j) / (⟨M⟩_{j+1} − ⟨M⟩_j),  N_j = Δ Σ_{i<j} g(s_i,t_j) X_i.
/// N uses X at the left end of each cell, so Q_j depends on X_0..X_j only.
std::vector<double> compute_Q_direct(const PathBundle& path, const TransferKernel& kernel, const QVTable& qv);

struct TransformedPath {
  TimeGrid grid;
  std::vector<double> z;
  std::vector<double> q;
  std::vector<double> v;
};

TransformedPath transform_path(const PathBundle& path, const TransferKernel& kernel, const QVTable& qv);

struct EstimateRecord {
  double theta_hat = 0.0;
  double numerator = 0.0;    // ∫₀ᵀ Q dZ
  double denominator = 0.0;  // ∫₀ᵀ Q² d⟨M⟩
  double horizon = 0.0;
  double hurst = 0.0;
  std::uint64_t rep_id = 0;
  bool interpolated_kernel = false;
};

/// Denominators at or below this are degenerate.
inline constexpr double kDegenerateDenominator = 1e-14;

/// ∫ Q dZ (left-point) and ∫ Q² d⟨M⟩ (trapezoid against ⟨M⟩ increments).
std::pair<double, double> sufficient_statistics(const TransformedPath& tp, const QVTable& qv);

/// θ̂ = −∫Q dZ / ∫Q² d⟨M⟩. Throws DegeneratePath.
EstimateRecord mle(const TransformedPath& tp, const QVTable& qv);

/// log L_T(θ) = −θ ∫Q dZ − (θ²/2) ∫Q² d⟨M⟩. Throws DegeneratePath.
double log_likelihood(double theta, const TransformedPath& tp, const QVTable& qv);

/// Σ_T(θ) = −∫Q dZ − θ ∫Q² d⟨M⟩. Throws DegeneratePath.
double score(double theta, const TransformedPath& tp, const QVTable& qv);

/// X_{t_j} = Σ_{i<j} ĝ(s_i, t_j)(Z_{i+1} − Z_i).
std::vector<double> reconstruct_X(std::span<const double> z, const InverseKernel& inv);

/// Reusable simulate → transform → estimate pipeline for one (H, θ, grid).
/// Builds the kernel once; `run` is safe to call concurrently.
class EstimationPipeline {
 public:
  explicit EstimationPipeline(const ProcessSpec& spec, const KernelOptions& options = {});
  /// Reuses a kernel built (or loaded) elsewhere for the same H and grid.
  EstimationPipeline(const ProcessSpec& spec, TransferKernel kernel);

  const ProcessSpec& spec() const noexcept { return sampler_.spec(); }
  const TransferKernel& kernel() const noexcept { return kernel_; }
  const QVTable& qv() const noexcept { return qv_; }

  /// Replication `rep_id` draws from RandomStream(master_seed, rep_id).
  /// `drift` overrides the simulation drift (importance sampling under a
  /// tilted measure); the kernel only depends on H and the grid.
  EstimateRecord run(std::uint64_t master_seed, std::uint64_t rep_id, std::optional<double> drift = {}) const;
  /// Same, returning nullopt instead of throwing on a degenerate path.
  std::optional<EstimateRecord> try_run(std::uint64_t master_seed, std::uint64_t rep_id,
                                        std::optional<double> drift = {}) const;

 private:
  MixedPathSampler sampler_;
  TransferKernel kernel_;
  QVTable qv_;
};

/// Header `rep_id,H,theta_true,T,n,theta_hat,numerator,denominator,interpolated_kernel`.
void write_estimates_header(std::ostream& out);
void write_estimate_row(std::ostream& out, const EstimateRecord& rec, double theta_true, std::size_t cells);

}  // namespace mfou
