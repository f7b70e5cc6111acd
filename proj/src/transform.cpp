#include "mfou/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <string>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"
#include "mfou/numerics/linalg.hpp"
#include "mfou/numerics/quadrature.hpp"
#include "mfou/numerics/random.hpp"

namespace mfou {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double signed_power(double u, double exponent) {
  if (u == 0.0) return 0.0;
  const double m = std::pow(std::abs(u), exponent);
  return u > 0.0 ? m : -m;
}

void validate_kernel_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst <= 1.0)) {
    throw Error(Errc::domain_error, "kernel: Hurst exponent H must lie in (0,1], got " + std::to_string(hurst));
  }
}

// Linear interpolation of a cellwise column in the scaled coordinate u = s/t.
double scaled_lookup(std::span<const double> column, double u) {
  const double m = static_cast<double>(column.size());
  const double pos = u * m - 0.5;  // midpoints sit at (i + ½)/m
  if (pos <= 0.0) return column.front();
  if (pos >= m - 1.0) return column.back();
  const auto i = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * column[i] + w * column[i + 1];
}

}  // namespace

std::vector<double> collocation_coefficients(double hurst, double step, std::size_t count) {
  validate_kernel_hurst(hurst);
  const double exponent = 2.0 * hurst - 1.0;
  std::vector<double> c(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double kk = static_cast<double>(k);
    c[k] = hurst * (signed_power((kk + 0.5) * step, exponent) - signed_power((kk - 0.5) * step, exponent));
  }
  if (count > 0) c[0] += 1.0;
  return c;
}

KernelColumn solve_g(double hurst, std::size_t horizon_index, const TimeGrid& grid) {
  if (horizon_index == 0 || horizon_index > grid.cells() + 1) {
    throw Error(Errc::node_out_of_range, "solve_g: horizon index " + std::to_string(horizon_index));
  }
  const std::size_t m = horizon_index;
  const auto c = collocation_coefficients(hurst, grid.step(), m);
  Matrix a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = c[i > j ? i - j : j - i];
  const Vector ones = Vector::Ones(m);
  Vector g;
  try {
    g = solve_dense(a, ones);
  } catch (const Error& e) {
    throw Error(Errc::solve_failed, std::string("kernel column ") + std::to_string(m) + ": " + e.what());
  }
  KernelColumn out{std::vector<double>(g.data(), g.data() + m), (a * g - ones).cwiseAbs().maxCoeff()};
  if (!(out.residual <= 1e-9)) {
    throw Error(Errc::residual_too_large, "kernel column " + std::to_string(m) + " residual " + std::to_string(out.residual));
  }
  return out;
}

TransferKernel::TransferKernel(const TimeGrid& grid, double hurst, KernelMethod method)
    : grid_(grid),
      hurst_(hurst),
      method_(method),
      packed_(offset(grid.cells() + 2), 0.0),
      residuals_(grid.cells() + 1, kNaN) {}

std::span<const double> TransferKernel::column(std::size_t j) const {
  if (j == 0 || j > grid_.cells() + 1) {
    throw Error(Errc::node_out_of_range, "kernel column " + std::to_string(j) + " out of range");
  }
  return {packed_.data() + offset(j), j};
}

std::span<double> TransferKernel::column_mut(std::size_t j) { return {packed_.data() + offset(j), j}; }

double TransferKernel::max_residual() const noexcept {
  double worst = 0.0;
  for (double r : residuals_)
    if (!std::isnan(r)) worst = std::max(worst, r);
  return worst;
}

std::size_t TransferKernel::checked_columns() const noexcept {
  return static_cast<std::size_t>(std::count_if(residuals_.begin(), residuals_.end(), [](double r) { return !std::isnan(r); }));
}

TransferKernel build_kernel(const ProcessSpec& spec, const KernelOptions& options) {
  const TimeGrid& grid = spec.grid;
  const std::size_t n = grid.cells();
  const std::size_t columns = n + 1;  // horizons t_1..t_{n+1}
  TransferKernel kernel(grid, spec.hurst, options.method);
  kernel.coefficients_ = collocation_coefficients(spec.hurst, grid.step(), columns + 1);
  const std::span<const double> coeff(kernel.coefficients_.data(), columns);
  const std::vector<double> ones(columns, 1.0);

  if (options.method == KernelMethod::levinson) {
    solve_toeplitz_nested(coeff, ones, [&](std::size_t m, std::span<const double> x) {
      std::copy(x.begin(), x.end(), kernel.column_mut(m).begin());
    });
    // Full residual check costs O(n³); beyond 2048 cells check a stride.
    const std::size_t stride = columns <= 2049 ? 1 : (columns + 255) / 256;
    for (std::size_t j = 1; j <= columns; ++j) {
      if (j % stride != 0 && j + 1 < columns) continue;
      kernel.residuals_[j - 1] = toeplitz_residual(coeff.first(j), kernel.column(j), std::span(ones).first(j));
    }
  } else {
    const bool thin = n > options.thinning_threshold;
    const std::size_t stride = std::max<std::size_t>(options.thinning_stride, 1);
    auto solved = [&](std::size_t j) { return !thin || j % stride == 0 || j + 1 >= columns || j < stride; };
    for (std::size_t j = 1; j <= columns; ++j) {
      if (!solved(j)) continue;
      auto col = solve_g(spec.hurst, j, grid);
      std::copy(col.values.begin(), col.values.end(), kernel.column_mut(j).begin());
      kernel.residuals_[j - 1] = col.residual;
    }
    if (thin) {
      std::vector<std::size_t> skipped;
      for (std::size_t j = 1; j <= columns; ++j) {
        if (solved(j)) continue;
        skipped.push_back(j);
        std::size_t lo = j - 1, hi = j + 1;
        while (!solved(lo)) --lo;
        while (!solved(hi)) ++hi;
        const double w = static_cast<double>(j - lo) / static_cast<double>(hi - lo);
        auto dst = kernel.column_mut(j);
        const auto left = kernel.column(lo), right = kernel.column(hi);
        for (std::size_t i = 0; i < j; ++i) {
          const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(j);
          dst[i] = (1.0 - w) * scaled_lookup(left, u) + w * scaled_lookup(right, u);
        }
      }
      kernel.interpolated_columns_ = skipped.size();
      RandomStream pick(options.spot_check_seed, spec.grid.cells());
      const std::size_t checks = std::min(options.spot_checks, skipped.size());
      for (std::size_t k = 0; k < checks; ++k) {
        const std::size_t j = skipped[pick() % skipped.size()];
        const auto exact = solve_g(spec.hurst, j, grid);
        const auto approx = kernel.column(j);
        for (std::size_t i = 0; i < j; ++i) {
          kernel.interpolation_deviation_ = std::max(kernel.interpolation_deviation_, std::abs(exact.values[i] - approx[i]));
        }
      }
    }
  }

  for (std::size_t j = 1; j <= columns; ++j) {
    const double r = kernel.residuals_[j - 1];
    if (!std::isnan(r) && !(r <= options.residual_tolerance)) {
      throw Error(Errc::residual_too_large, "kernel column " + std::to_string(j) + " residual " + std::to_string(r));
    }
  }
  return kernel;
}

namespace {

constexpr char kKernelMagic[8] = {'M', 'F', 'O', 'U', 'K', 'R', 'N', '\0'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(Errc::io_error, "truncated kernel cache");
  return v;
}

void put_vector(std::ostream& out, const std::vector<double>& v) {
  put<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_vector(std::istream& in, std::size_t expected) {
  const auto size = get<std::uint64_t>(in);
  if (size != expected) throw Error(Errc::io_error, "kernel cache has unexpected length");
  std::vector<double> v(size);
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(size * sizeof(double)))) {
    throw Error(Errc::io_error, "truncated kernel cache");
  }
  return v;
}

}  // namespace

void save_kernel(std::ostream& out, const TransferKernel& kernel) {
  out.write(kKernelMagic, sizeof kKernelMagic);
  put<std::int32_t>(out, kKernelSchemeVersion);
  put<double>(out, kernel.hurst_);
  put<double>(out, kernel.grid_.horizon());
  put<std::uint64_t>(out, kernel.grid_.cells());
  put<std::int32_t>(out, static_cast<std::int32_t>(kernel.method_));
  put<std::uint64_t>(out, kernel.interpolated_columns_);
  put<double>(out, kernel.interpolation_deviation_);
  put_vector(out, kernel.packed_);
  put_vector(out, kernel.coefficients_);
  put_vector(out, kernel.residuals_);
  if (!out) throw Error(Errc::io_error, "failed to write kernel cache");
}

TransferKernel load_kernel(std::istream& in, const ProcessSpec& spec) {
  char magic[sizeof kKernelMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kKernelMagic)) {
    throw Error(Errc::io_error, "not a kernel cache file");
  }
  if (get<std::int32_t>(in) != kKernelSchemeVersion) throw Error(Errc::io_error, "kernel cache scheme version differs");
  const double hurst = get<double>(in);
  const double horizon = get<double>(in);
  const auto cells = get<std::uint64_t>(in);
  if (hurst != spec.hurst || horizon != spec.grid.horizon() || cells != spec.grid.cells()) {
    throw Error(Errc::io_error, "kernel cache was written for another (H, T, n)");
  }
  const auto method = static_cast<KernelMethod>(get<std::int32_t>(in));
  TransferKernel kernel(spec.grid, hurst, method);
  kernel.interpolated_columns_ = get<std::uint64_t>(in);
  kernel.interpolation_deviation_ = get<double>(in);
  kernel.packed_ = get_vector(in, kernel.packed_.size());
  kernel.coefficients_ = get_vector(in, cells + 2);
  kernel.residuals_ = get_vector(in, kernel.residuals_.size());
  return kernel;
}

namespace {

QVTable finish_table(const TimeGrid& grid, std::vector<double> bracket, double lookahead) {
  for (std::size_t k = 0; k + 1 < bracket.size(); ++k) {
    if (!(bracket[k + 1] > bracket[k])) {
      throw Error(Errc::non_monotone_bracket, "bracket does not increase at node " + std::to_string(k + 1));
    }
  }
  if (!(lookahead > bracket.back())) {
    throw Error(Errc::non_monotone_bracket, "bracket does not increase past the horizon");
  }
  QVTable qv{grid, std::move(bracket), {}, {}, lookahead};
  qv.dbracket = finite_diff_derivative(qv.bracket, grid);
  qv.psi_diag.resize(qv.dbracket.size());
  for (std::size_t k = 0; k < qv.dbracket.size(); ++k) {
    if (!(qv.dbracket[k] > 0.0)) {
      throw Error(Errc::non_monotone_bracket, "d<M>/dt not positive at node " + std::to_string(k));
    }
    qv.psi_diag[k] = 1.0 / qv.dbracket[k];
  }
  return qv;
}

}  // namespace

QVTable quadratic_variation(const TransferKernel& kernel) {
  const TimeGrid& grid = kernel.grid();
  const std::size_t n = grid.cells();
  std::vector<double> bracket(n + 1, 0.0);
  double lookahead = 0.0;
  for (std::size_t j = 1; j <= n + 1; ++j) {
    double acc = 0.0;
    for (double v : kernel.column(j)) acc += v;
    (j <= n ? bracket[j] : lookahead) = grid.step() * acc;
  }
  return finish_table(grid, std::move(bracket), lookahead);
}

QVTable quadratic_variation(double hurst, const TimeGrid& grid) {
  const std::size_t n = grid.cells();
  const auto coeff = collocation_coefficients(hurst, grid.step(), n + 1);
  const std::vector<double> ones(n + 1, 1.0);
  std::vector<double> bracket(n + 1, 0.0);
  double lookahead = 0.0;
  solve_toeplitz_nested(coeff, ones, [&](std::size_t m, std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    (m <= n ? bracket[m] : lookahead) = grid.step() * acc;
  });
  return finish_table(grid, std::move(bracket), lookahead);
}

std::vector<double> QVTable::bracket_increments() const { return increments(bracket); }

double QVTable::psi_at(double t) const {
  const double h = grid.step();
  const double pos = std::clamp(t / h, 0.0, static_cast<double>(grid.cells()));
  const auto k = std::min(static_cast<std::size_t>(pos), grid.cells() - 1);
  const double w = pos - static_cast<double>(k);
  return (1.0 - w) * psi_diag[k] + w * psi_diag[k + 1];
}

double psi_offdiag(double s, double t, const QVTable& qv) {
  const std::size_t i = qv.grid.index_of(s);
  const std::size_t j = qv.grid.index_of(t);
  return 0.5 * (qv.psi_diag[i] + qv.psi_diag[j]);
}

InverseKernel::InverseKernel(const TimeGrid& grid, std::vector<double> packed) : grid_(grid), packed_(std::move(packed)) {}

std::span<const double> InverseKernel::column(std::size_t j) const {
  if (j == 0 || j > grid_.cells()) {
    throw Error(Errc::node_out_of_range, "inverse kernel column " + std::to_string(j) + " out of range");
  }
  return {packed_.data() + (j - 1) * j / 2, j};
}

InverseKernel inverse_kernel(const TransferKernel& kernel, const QVTable& qv) {
  require_same_grid(kernel.grid(), qv.grid, "inverse_kernel");
  const TimeGrid& grid = kernel.grid();
  const std::size_t n = grid.cells();
  const double h = grid.step();
  const auto coeff = kernel.coefficients();

  // inner[i][j − i] = ∫₀^{t_j} g(r, s_i) dr for j ≥ i, with the column for
  // horizon s_i continued past s_i through the kernel equation.
  std::vector<std::vector<double>> inner(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    auto& row = inner[i];
    row.assign(n - i + 1, 0.0);
    row[0] = qv.bracket[i];
    const std::span<const double> col = i == 0 ? std::span<const double>() : kernel.column(i);
    for (std::size_t c = i; c < n; ++c) {
      double ext = 1.0;
      for (std::size_t k = 0; k < i; ++k) ext -= coeff[c - k] * col[k];
      row[c - i + 1] = row[c - i] + h * ext;
    }
  }

  std::vector<double> packed(n * (n + 1) / 2);
  for (std::size_t j = 1; j <= n; ++j) {
    double* dst = packed.data() + (j - 1) * j / 2;
    for (std::size_t i = 0; i < j; ++i) {
      const double d_inner = inner[i + 1][j - i - 1] - inner[i][j - i];
      const double d_bracket = qv.bracket[i + 1] - qv.bracket[i];
      dst[i] = 1.0 - d_inner / d_bracket;
    }
  }
  return InverseKernel(grid, std::move(packed));
}

void write_kernel_csv(std::ostream& out, const TransferKernel& kernel) {
  out << "s,t,g\n";
  const TimeGrid& grid = kernel.grid();
  for (std::size_t j = 1; j <= grid.cells(); ++j) {
    const auto col = kernel.column(j);
    for (std::size_t i = 0; i < j; ++i) {
      csv::write_row(out, {csv::number(grid.node(i)), csv::number(grid.node(j)), csv::number(col[i])});
    }
  }
  if (!out) throw Error(Errc::io_error, "failed writing kernel CSV");
}

void write_bracket_csv(std::ostream& out, const QVTable& qv) {
  out << "t,bracket,psi\n";
  for (std::size_t k = 0; k < qv.bracket.size(); ++k) {
    csv::write_row(out, {csv::number(qv.grid.node(k)), csv::number(qv.bracket[k]), csv::number(qv.psi_diag[k])});
  }
  if (!out) throw Error(Errc::io_error, "failed writing bracket CSV");
}

}  // namespace mfou
