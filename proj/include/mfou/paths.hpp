#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mfou/numerics/grid.hpp"
#include "mfou/numerics/linalg.hpp"
#include "mfou/numerics/random.hpp"

namespace mfou {

/// Model dX = −θ X dt + dB̃, B̃ = B + B^H, X_0 = 0, observed on `grid`.
struct ProcessSpec {
  ProcessSpec(double hurst, double theta, TimeGrid grid);

  double hurst;
  double theta;
  TimeGrid grid;

  /// H outside [1/2, 1): accepted, but the kernel solver is not validated there.
  bool experimental() const noexcept { return hurst < 0.5 || hurst >= 1.0; }
  /// H = 1 is simulated as B^1_t = t ξ.
  bool degenerate_fbm() const noexcept { return hurst == 1.0; }
};

/// R(s, t) = ½ (t^{2H} + s^{2H} − |t − s|^{2H}).
double fbm_covariance(double s, double t, double hurst);

/// Covariance of two fBm increments over cells of width `step` that are
/// `lag` cells apart.
double fgn_autocovariance(std::size_t lag, double step, double hurst);

enum class FbmMethod { circulant, cholesky, degenerate };
const char* to_string(FbmMethod m) noexcept;

/// Exact sampler for the n fBm increments on a uniform grid. The default
/// route is circulant embedding of the increment autocovariance; if the
/// embedding has negative eigenvalues it falls back to a Cholesky factor of
/// the full increment covariance. Immutable once built, so one sampler can be
/// shared by every replication.
class FbmSampler {
 public:
  FbmSampler(double hurst, const TimeGrid& grid);
  ~FbmSampler();
  FbmSampler(const FbmSampler&) = delete;
  FbmSampler& operator=(const FbmSampler&) = delete;

  std::vector<double> sample(RandomStream& rng) const;

  FbmMethod method() const noexcept { return method_; }
  /// Most negative circulant eigenvalue relative to the largest (0 if none).
  double embedding_defect() const noexcept { return embedding_defect_; }

 private:
  struct Fft;

  double hurst_;
  TimeGrid grid_;
  FbmMethod method_ = FbmMethod::circulant;
  double embedding_defect_ = 0.0;
  std::vector<double> sqrt_eigen_;  // sqrt(λ_k / M)
  Matrix cholesky_;
  std::unique_ptr<Fft> fft_;
};

std::vector<double> sample_fbm_increments(const ProcessSpec& spec, RandomStream& rng);

/// One replication: increments of B, B^H, B̃ and the state X at every node.
struct PathBundle {
  TimeGrid grid;
  std::vector<double> d_brownian;
  std::vector<double> d_fbm;
  std::vector<double> d_mixed;
  std::vector<double> x;

  /// Running sums of an increment series, starting at 0.
  static std::vector<double> cumulative(std::span<const double> increments);
};

struct PathOptions {
  /// Forces both noise sources to zero (debugging the recursion).
  bool zero_noise = false;
};

/// Euler recursion X_{k+1} = X_k − θ X_k Δ + ΔB̃_k from given increments.
PathBundle assemble_path(const ProcessSpec& spec, std::vector<double> d_brownian, std::vector<double> d_fbm);

/// Samples B from rng.substream(0) and B^H from rng.substream(1).
class MixedPathSampler {
 public:
  explicit MixedPathSampler(const ProcessSpec& spec, PathOptions options = {});

  PathBundle sample(RandomStream& rng) const;
  /// Same noise draw, with the Euler recursion run at drift `theta`.
  PathBundle sample(RandomStream& rng, double theta) const;
  const ProcessSpec& spec() const noexcept { return spec_; }
  const FbmSampler& fbm() const noexcept { return *fbm_; }

 private:
  ProcessSpec spec_;
  PathOptions options_;
  std::shared_ptr<const FbmSampler> fbm_;
};

PathBundle sample_mixed_path(const ProcessSpec& spec, RandomStream& rng, PathOptions options = {});

/// Cov(X_t, X_s) for the continuous model X_t = ∫₀ᵗ e^{−θ(t−u)} dB̃_u at the
/// given grid times, by quadrature of the exponential kernel against the exact
/// mixed increment covariance on grids 8× and 16× finer than spec.grid,
/// combined by one Richardson step.
/// Throws NodeSetTooLarge above 32 nodes.
SymmetricMatrix exact_ou_covariance_oracle(const ProcessSpec& spec, std::span<const double> times);

/// CSV with header `t,B,B^H,Btilde,X`, 17 significant digits.
void write_paths_csv(std::ostream& out, const PathBundle& path);

}  // namespace mfou
