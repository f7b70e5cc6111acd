#pragma once

#include <cstdint>
#include <iosfwd>
#include <istream>
#include <span>
#include <vector>

#include "mfou/numerics/grid.hpp"
#include "mfou/paths.hpp"

namespace mfou {

// Discretization of g(s,t) + H d/ds ∫₀ᵗ g(r,t)|s−r|^{2H−1} sign(s−r) dr = 1.
//
// g(·, t_j) is taken constant on each of the j grid cells below t_j. Using
//   ∫_a^b |s−r|^{2H−1} sign(s−r) dr = (|s−a|^{2H} − |s−b|^{2H}) / (2H)
// the operator is exact on such functions, and collocating at cell midpoints
// gives the j×j system  Σ_k c_{|i−k|} g_k = 1  with
//   c_0 = 1 + H(φ(Δ/2) − φ(−Δ/2)),  c_k = H(φ((k+½)Δ) − φ((k−½)Δ)),
//   φ(u) = |u|^{2H−1} sign(u).
// The matrix is symmetric Toeplitz and every horizon uses a leading block of
// the same matrix, so all columns come out of one Levinson sweep.

/// c_0..c_{count−1} of the collocation matrix.
std::vector<double> collocation_coefficients(double hurst, double step, std::size_t count);

struct KernelColumn {
  std::vector<double> values;  // g on cells 0..j−1
  double residual = 0.0;       // max-norm residual of the collocation system
};

/// Column for horizon t_j by a dense LU solve of the collocation system.
/// Throws SolveFailed, or ResidualTooLarge when the residual exceeds 1e-9.
KernelColumn solve_g(double hurst, std::size_t horizon_index, const TimeGrid& grid);

enum class KernelMethod {
  levinson,  // every column from the nested Toeplitz recursion
  dense,     // solve_g per column, thinned beyond `thinning_threshold` cells
};

struct KernelOptions {
  KernelMethod method = KernelMethod::levinson;
  std::size_t thinning_threshold = 512;
  std::size_t thinning_stride = 4;
  std::size_t spot_checks = 5;
  std::uint64_t spot_check_seed = 0x5eedULL;
  double residual_tolerance = 1e-9;
};

/// Triangular table g(s_i, t_j), i < j, for j = 1..n, plus one look-ahead
/// column for t_{n+1} = T + Δ (used by the forward differences at t_n).
class TransferKernel {
 public:
  const TimeGrid& grid() const noexcept { return grid_; }
  double hurst() const noexcept { return hurst_; }
  KernelMethod method() const noexcept { return method_; }
  bool experimental() const noexcept { return hurst_ < 0.5 || hurst_ >= 1.0; }

  /// Cell values of g(·, t_j) for j = 1..n+1.
  std::span<const double> column(std::size_t j) const;
  double g(std::size_t i, std::size_t j) const { return column(j)[i]; }

  /// Off-diagonal collocation coefficients c_0..c_{n+1} (c_0 includes the identity).
  std::span<const double> coefficients() const noexcept { return coefficients_; }

  /// Residual per column j = 1..n+1 (index j−1); NaN where not evaluated.
  std::span<const double> residuals() const noexcept { return residuals_; }
  double max_residual() const noexcept;
  std::size_t checked_columns() const noexcept;

  bool interpolated() const noexcept { return interpolated_columns_ > 0; }
  std::size_t interpolated_columns() const noexcept { return interpolated_columns_; }
  /// Largest |interpolated − solved| over the spot-checked skipped columns.
  double interpolation_deviation() const noexcept { return interpolation_deviation_; }

 private:
  friend TransferKernel build_kernel(const ProcessSpec&, const KernelOptions&);
  friend void save_kernel(std::ostream&, const TransferKernel&);
  friend TransferKernel load_kernel(std::istream&, const ProcessSpec&);

  TransferKernel(const TimeGrid& grid, double hurst, KernelMethod method);
  static std::size_t offset(std::size_t j) noexcept { return (j - 1) * j / 2; }
  std::span<double> column_mut(std::size_t j);

  TimeGrid grid_;
  double hurst_;
  KernelMethod method_;
  std::vector<double> packed_;
  std::vector<double> coefficients_;
  std::vector<double> residuals_;
  std::size_t interpolated_columns_ = 0;
  double interpolation_deviation_ = 0.0;
};

TransferKernel build_kernel(const ProcessSpec& spec, const KernelOptions& options = {});

/// Bumped whenever the discretization of the kernel changes; cached kernels
/// written under another version are rejected.
inline constexpr int kKernelSchemeVersion = 1;

/// Binary serialization for the disk cache.
void save_kernel(std::ostream& out, const TransferKernel& kernel);
/// Throws IoError when the stream is malformed or was written for another
/// (H, grid, scheme version).
TransferKernel load_kernel(std::istream& in, const ProcessSpec& spec);

/// ⟨M⟩, its time derivative and ψ(t,t) = dt/d⟨M⟩_t at every node.
struct QVTable {
  TimeGrid grid;
  std::vector<double> bracket;    // ⟨M⟩_{t_k}, k = 0..n
  std::vector<double> dbracket;   // d⟨M⟩/dt
  std::vector<double> psi_diag;   // 1 / d⟨M⟩/dt
  double bracket_lookahead = 0.0; // ⟨M⟩ at t_{n+1}

  /// Increments ⟨M⟩_{k+1} − ⟨M⟩_k, k = 0..n−1.
  std::vector<double> bracket_increments() const;
  /// ψ(t,t) at an arbitrary time in [0, T], linear between nodes.
  double psi_at(double t) const;
};

/// ⟨M⟩_{t_j} = ∫₀^{t_j} g(s, t_j) ds (exact for the cellwise-constant column),
/// derivative by second-order finite differences. Throws NonMonotoneBracket.
QVTable quadratic_variation(const TransferKernel& kernel);

/// Same table without storing the kernel: one Levinson sweep, O(n) memory.
/// For long horizons where only ⟨M⟩ and ψ are needed.
QVTable quadratic_variation(double hurst, const TimeGrid& grid);

/// ψ(s,t) = ½(ψ(s,s) + ψ(t,t)) at grid times s, t.
double psi_offdiag(double s, double t, const QVTable& qv);

/// ĝ(s, t) = 1 − d/d⟨M⟩_s ∫₀ᵗ g(r, s) dr, per cell: column j holds ĝ for the
/// increments ΔZ_i, i < j. For r beyond s the column g(·, s) is continued by
/// the kernel equation itself, g(r, s) = 1 − H d/dr ∫₀ˢ g(u,s)|r−u|^{2H−1}sign(r−u) du.
class InverseKernel {
 public:
  InverseKernel(const TimeGrid& grid, std::vector<double> packed);
  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> column(std::size_t j) const;

 private:
  TimeGrid grid_;
  std::vector<double> packed_;
};

InverseKernel inverse_kernel(const TransferKernel& kernel, const QVTable& qv);

/// `s,t,g` rows, one per table entry (s is the cell's left node).
void write_kernel_csv(std::ostream& out, const TransferKernel& kernel);
/// `t,bracket,psi` rows.
void write_bracket_csv(std::ostream& out, const QVTable& qv);

}  // namespace mfou
