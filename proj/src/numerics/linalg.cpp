#include "mfou/numerics/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mfou/error.hpp"

namespace mfou {

SymmetricMatrix::SymmetricMatrix(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) {
    throw Error(Errc::domain_error, "symmetric matrix must be square");
  }
  const double scale = m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff();
  const double asym = m_.size() == 0 ? 0.0 : (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300)) {
    throw Error(Errc::domain_error, "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
}

Matrix cholesky_factor(const SymmetricMatrix& c) {
  const Matrix& a = c.matrix();
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  const double floor = n == 0 ? 0.0 : 1e-15 * a.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > floor)) {
      throw Error(Errc::not_positive_definite,
                  "pivot " + std::to_string(j) + " = " + std::to_string(pivot) + " is not above the floor");
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / d;
    }
  }
  return l;
}

JitteredCholesky cholesky_with_jitter(const SymmetricMatrix& c) {
  try {
    return {cholesky_factor(c), 0.0, 0};
  } catch (const Error& e) {
    if (e.code() != Errc::not_positive_definite) throw;
  }
  const double dim = static_cast<double>(std::max<Eigen::Index>(c.dim(), 1));
  double jitter = 1e-12 * c.trace() / dim;
  for (int k = 1; k <= 4; ++k) {
    Matrix shifted = c.matrix();
    shifted.diagonal().array() += jitter;
    try {
      return {cholesky_factor(SymmetricMatrix(std::move(shifted))), jitter, k - 1};
    } catch (const Error& e) {
      if (e.code() != Errc::not_positive_definite || k == 4) throw;
    }
    jitter *= 10.0;
  }
  throw Error(Errc::not_positive_definite, "jitter escalation exhausted");
}

Vector solve_dense(const Matrix& a, const Vector& rhs) {
  if (a.rows() != a.cols() || a.rows() != rhs.size()) {
    throw Error(Errc::length_mismatch, "solve_dense: dimensions do not match");
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double scale = a.cwiseAbs().maxCoeff();
  const auto& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    if (std::abs(packed(i, i)) <= 1e3 * std::numeric_limits<double>::min() ||
        std::abs(packed(i, i)) <= 1e-15 * scale) {
      throw Error(Errc::singular, "vanishing pivot at row " + std::to_string(i));
    }
  }
  Vector x = lu.solve(rhs);
  const double res = (a * x - rhs).cwiseAbs().maxCoeff();
  const double bound = 1e-10 * std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
  if (!(res <= bound)) {
    throw Error(Errc::solve_failed, "residual " + std::to_string(res) + " exceeds bound");
  }
  return x;
}

void solve_toeplitz_nested(std::span<const double> column, std::span<const double> rhs,
                           const std::function<void(std::size_t, std::span<const double>)>& visit) {
  const std::size_t n = column.size();
  if (rhs.size() != n) throw Error(Errc::length_mismatch, "toeplitz solve: rhs length differs from column length");
  if (n == 0) return;
  const double t0 = column[0];
  if (std::abs(t0) == 0.0) throw Error(Errc::singular, "toeplitz diagonal is zero");

  // f solves T_m f = e_1; by symmetry the reversed f solves T_m b = e_m.
  std::vector<double> f(n, 0.0), f_next(n, 0.0), x(n, 0.0);
  f[0] = 1.0 / t0;
  x[0] = rhs[0] / t0;
  visit(1, std::span<const double>(x.data(), 1));
  for (std::size_t m = 1; m < n; ++m) {
    // eps = last row of T_{m+1} applied to [f; 0].
    double eps = 0.0;
    for (std::size_t i = 0; i < m; ++i) eps += column[m - i] * f[i];
    const double denom = 1.0 - eps * eps;
    if (std::abs(denom) < 1e-14) {
      throw Error(Errc::singular, "leading Toeplitz minor of order " + std::to_string(m + 1) + " is singular");
    }
    // f' = ([f;0] - eps [0; rev f]) / denom
    for (std::size_t i = 0; i <= m; ++i) {
      const double head = i < m ? f[i] : 0.0;
      const double tail = i > 0 ? f[m - i] : 0.0;
      f_next[i] = (head - eps * tail) / denom;
    }
    std::copy_n(f_next.begin(), m + 1, f.begin());

    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) err += column[m - i] * x[i];
    const double gain = rhs[m] - err;
    // backward vector b = rev(f)
    for (std::size_t i = 0; i <= m; ++i) x[i] += gain * f[m - i];
    visit(m + 1, std::span<const double>(x.data(), m + 1));
  }
}

double toeplitz_residual(std::span<const double> column, std::span<const double> x, std::span<const double> rhs) {
  const std::size_t m = x.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double acc = -rhs[i];
    for (std::size_t j = 0; j < m; ++j) acc += column[i > j ? i - j : j - i] * x[j];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

}  // namespace mfou
