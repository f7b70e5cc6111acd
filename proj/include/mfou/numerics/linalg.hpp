#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>

namespace mfou {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense symmetric matrix; construction rejects asymmetry beyond 1e-12
/// relative to the largest entry.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix entries);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

/// Lower-triangular L with L Lᵀ = C. Throws NotPositiveDefinite naming the
/// first pivot that is not above the floor 1e-15 · max diag.
Matrix cholesky_factor(const SymmetricMatrix& c);

struct JitteredCholesky {
  Matrix factor;
  double jitter = 0.0;  // diagonal shift that was finally used
  int escalations = 0;
};

/// Retries a failed factorization with diagonal jitter 1e-12·trace/dim,
/// escalating ×10 at most three times.
JitteredCholesky cholesky_with_jitter(const SymmetricMatrix& c);

/// LU solve with partial pivoting. Throws Singular on a vanishing pivot and
/// SolveFailed when ‖A x − rhs‖∞ > 1e-10 ‖rhs‖∞.
Vector solve_dense(const Matrix& a, const Vector& rhs);

/// Nested Levinson recursion for the symmetric Toeplitz matrix with first
/// column `column`: for m = 1..column.size() solves T_m x = rhs[0..m) and
/// hands each solution to `visit(m, x)`. Total cost O(N²).
/// Throws Singular if a leading minor vanishes.
void solve_toeplitz_nested(std::span<const double> column, std::span<const double> rhs,
                           const std::function<void(std::size_t, std::span<const double>)>& visit);

/// max_i |Σ_j t_{|i-j|} x_j − rhs_i| for the leading m×m Toeplitz block.
double toeplitz_residual(std::span<const double> column, std::span<const double> x, std::span<const double> rhs);

}  // namespace mfou
