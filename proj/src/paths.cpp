#include "mfou/paths.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <ostream>
#include <string>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"

namespace mfou {
namespace {

// FFTW planning is not thread safe; executing an existing plan is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void validate_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst <= 1.0)) {
    throw Error(Errc::domain_error, "Hurst exponent H must lie in (0,1], got " + std::to_string(hurst));
  }
}

}  // namespace

ProcessSpec::ProcessSpec(double hurst_, double theta_, TimeGrid grid_) : hurst(hurst_), theta(theta_), grid(grid_) {
  validate_hurst(hurst);
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw Error(Errc::domain_error, "drift theta must be strictly positive, got " + std::to_string(theta));
  }
}

double fbm_covariance(double s, double t, double hurst) {
  validate_hurst(hurst);
  if (s < 0.0 || t < 0.0) throw Error(Errc::domain_error, "fbm_covariance: times must be nonnegative");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_autocovariance(std::size_t lag, double step, double hurst) {
  const double h2 = 2.0 * hurst;
  const double k = static_cast<double>(lag);
  const double unit = lag == 0 ? 1.0
                               : 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(k - 1.0, h2));
  return unit * std::pow(step, h2);
}

const char* to_string(FbmMethod m) noexcept {
  switch (m) {
    case FbmMethod::circulant: return "circulant";
    case FbmMethod::cholesky: return "cholesky";
    case FbmMethod::degenerate: return "degenerate";
  }
  return "unknown";
}

struct FbmSampler::Fft {
  explicit Fft(std::size_t size) : size(size) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* buf = fftw_alloc_complex(size);
    plan = fftw_plan_dft_1d(static_cast<int>(size), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  void forward(std::vector<std::complex<double>>& data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
  }

  std::size_t size;
  fftw_plan plan;
};

FbmSampler::FbmSampler(double hurst, const TimeGrid& grid) : hurst_(hurst), grid_(grid) {
  validate_hurst(hurst);
  const std::size_t n = grid.cells();
  const double step = grid.step();
  if (hurst == 1.0) {
    method_ = FbmMethod::degenerate;
    return;
  }

  // Circulant of size 2n whose first row is ρ_0..ρ_n, ρ_{n−1}..ρ_1.
  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> row(m);
  for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocovariance(k, step, hurst);
  for (std::size_t k = 1; k < n; ++k) row[m - k] = row[k];
  fft_ = std::make_unique<Fft>(m);
  fft_->forward(row);

  double largest = 0.0, smallest = 0.0;
  for (const auto& z : row) {
    largest = std::max(largest, z.real());
    smallest = std::min(smallest, z.real());
  }
  embedding_defect_ = largest > 0.0 ? smallest / largest : -1.0;
  if (embedding_defect_ >= -1e-10) {
    sqrt_eigen_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      sqrt_eigen_[k] = std::sqrt(std::max(row[k].real(), 0.0) / static_cast<double>(m));
    }
    return;
  }

  method_ = FbmMethod::cholesky;
  fft_.reset();
  Matrix cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = fgn_autocovariance(i > j ? i - j : j - i, step, hurst);
  try {
    cholesky_ = cholesky_with_jitter(SymmetricMatrix(std::move(cov))).factor;
  } catch (const Error& e) {
    throw Error(Errc::embedding_failed, std::string("circulant embedding negative and Cholesky failed: ") + e.what());
  }
}

FbmSampler::~FbmSampler() = default;

std::vector<double> FbmSampler::sample(RandomStream& rng) const {
  const std::size_t n = grid_.cells();
  std::vector<double> out(n);
  switch (method_) {
    case FbmMethod::degenerate: {
      const double xi = rng.normal();
      std::fill(out.begin(), out.end(), grid_.step() * xi);
      break;
    }
    case FbmMethod::circulant: {
      const std::size_t m = sqrt_eigen_.size();
      std::vector<std::complex<double>> w(m);
      for (std::size_t k = 0; k < m; ++k) {
        const double re = rng.normal();
        const double im = rng.normal();
        w[k] = sqrt_eigen_[k] * std::complex<double>(re, im);
      }
      fft_->forward(w);
      for (std::size_t k = 0; k < n; ++k) out[k] = w[k].real();
      break;
    }
    case FbmMethod::cholesky: {
      Vector z(n);
      for (std::size_t k = 0; k < n; ++k) z[k] = rng.normal();
      const Vector y = cholesky_.triangularView<Eigen::Lower>() * z;
      for (std::size_t k = 0; k < n; ++k) out[k] = y[k];
      break;
    }
  }
  return out;
}

std::vector<double> sample_fbm_increments(const ProcessSpec& spec, RandomStream& rng) {
  return FbmSampler(spec.hurst, spec.grid).sample(rng);
}

std::vector<double> PathBundle::cumulative(std::span<const double> increments) {
  std::vector<double> out(increments.size() + 1, 0.0);
  for (std::size_t i = 0; i < increments.size(); ++i) out[i + 1] = out[i] + increments[i];
  return out;
}

PathBundle assemble_path(const ProcessSpec& spec, std::vector<double> d_brownian, std::vector<double> d_fbm) {
  const std::size_t n = spec.grid.cells();
  if (d_brownian.size() != n || d_fbm.size() != n) {
    throw Error(Errc::length_mismatch, "assemble_path: increment series do not match the grid");
  }
  PathBundle p{spec.grid, std::move(d_brownian), std::move(d_fbm), std::vector<double>(n), std::vector<double>(n + 1)};
  const double decay = 1.0 - spec.theta * spec.grid.step();
  p.x[0] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    p.d_mixed[k] = p.d_brownian[k] + p.d_fbm[k];
    p.x[k + 1] = decay * p.x[k] + p.d_mixed[k];
  }
  return p;
}

MixedPathSampler::MixedPathSampler(const ProcessSpec& spec, PathOptions options)
    : spec_(spec), options_(options), fbm_(std::make_shared<FbmSampler>(spec.hurst, spec.grid)) {}

PathBundle MixedPathSampler::sample(RandomStream& rng) const { return sample(rng, spec_.theta); }

PathBundle MixedPathSampler::sample(RandomStream& rng, double theta) const {
  const ProcessSpec spec(spec_.hurst, theta, spec_.grid);
  const std::size_t n = spec.grid.cells();
  if (options_.zero_noise) return assemble_path(spec, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
  RandomStream brownian = rng.substream(0);
  RandomStream fractional = rng.substream(1);
  std::vector<double> db(n);
  const double sd = std::sqrt(spec_.grid.step());
  for (auto& v : db) v = sd * brownian.normal();
  return assemble_path(spec, std::move(db), fbm_->sample(fractional));
}

PathBundle sample_mixed_path(const ProcessSpec& spec, RandomStream& rng, PathOptions options) {
  return MixedPathSampler(spec, options).sample(rng);
}

namespace {

// Cell averages of e^{−θ(t − u)} on a grid `refine` times finer than spec.grid,
// contracted against the mixed increment covariance. Error O(h²).
Matrix ou_covariance_on_fine_grid(const ProcessSpec& spec, std::span<const double> times, std::size_t refine) {
  const std::size_t count = times.size();
  Matrix cov = Matrix::Zero(count, count);
  std::vector<std::size_t> fine_index(count);
  std::size_t fine_cells = 0;
  for (std::size_t a = 0; a < count; ++a) {
    fine_index[a] = refine * spec.grid.index_of(times[a]);
    fine_cells = std::max(fine_cells, fine_index[a]);
  }
  if (fine_cells == 0) return cov;

  const double h = spec.grid.step() / static_cast<double>(refine);
  const double theta = spec.theta;
  std::vector<double> rho(fine_cells);
  for (std::size_t k = 0; k < fine_cells; ++k) rho[k] = fgn_autocovariance(k, h, spec.hurst);

  // Cell averages of e^{−θ(t − u)} over the fine cells below each node.
  std::vector<std::vector<double>> weight(count, std::vector<double>(fine_cells, 0.0));
  for (std::size_t a = 0; a < count; ++a) {
    const double t = static_cast<double>(fine_index[a]) * h;
    for (std::size_t k = 0; k < fine_index[a]; ++k) {
      const double lo = static_cast<double>(k) * h, hi = lo + h;
      weight[a][k] = (std::exp(-theta * (t - hi)) - std::exp(-theta * (t - lo))) / (theta * h);
    }
  }
  std::vector<double> applied(fine_cells);
  for (std::size_t b = 0; b < count; ++b) {
    const auto& wb = weight[b];
    const std::size_t len = fine_index[b];
    // (h I + Toeplitz(ρ)) w_b
    for (std::size_t i = 0; i < fine_cells; ++i) {
      double acc = i < len ? h * wb[i] : 0.0;
      for (std::size_t j = 0; j < len; ++j) acc += rho[i > j ? i - j : j - i] * wb[j];
      applied[i] = acc;
    }
    for (std::size_t a = 0; a <= b; ++a) {
      double acc = 0.0;
      for (std::size_t i = 0; i < fine_index[a]; ++i) acc += weight[a][i] * applied[i];
      cov(a, b) = acc;
      cov(b, a) = acc;
    }
  }
  return cov;
}

}  // namespace

SymmetricMatrix exact_ou_covariance_oracle(const ProcessSpec& spec, std::span<const double> times) {
  constexpr std::size_t kMaxNodes = 32;
  if (times.size() > kMaxNodes) {
    throw Error(Errc::node_set_too_large, std::to_string(times.size()) + " nodes requested, at most 32 allowed");
  }
  // Richardson step on refinements 8 and 16.
  const Matrix coarse = ou_covariance_on_fine_grid(spec, times, 8);
  const Matrix fine = ou_covariance_on_fine_grid(spec, times, 16);
  return SymmetricMatrix((4.0 * fine - coarse) / 3.0);
}

void write_paths_csv(std::ostream& out, const PathBundle& path) {
  out << "t,B,B^H,Btilde,X\n";
  const auto b = PathBundle::cumulative(path.d_brownian);
  const auto bh = PathBundle::cumulative(path.d_fbm);
  const auto bt = PathBundle::cumulative(path.d_mixed);
  for (std::size_t k = 0; k < path.x.size(); ++k) {
    csv::write_row(out, {csv::number(path.grid.node(k)), csv::number(b[k]), csv::number(bh[k]), csv::number(bt[k]),
                         csv::number(path.x[k])});
  }
  if (!out) throw Error(Errc::io_error, "failed writing path CSV");
}

}  // namespace mfou
