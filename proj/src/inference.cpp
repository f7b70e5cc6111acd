#include "mfou/inference.hpp"

#include <Eigen/Core>
#include <ostream>
#include <string>

#include "mfou/csv.hpp"
#include "mfou/error.hpp"
#include "mfou/numerics/quadrature.hpp"

namespace mfou {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  using Map = Eigen::Map<const Eigen::VectorXd>;
  return Map(a.data(), static_cast<Eigen::Index>(a.size())).dot(Map(b.data(), static_cast<Eigen::Index>(a.size())));
}

void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(Errc::grid_mismatch, std::string(what) + ": series has " + std::to_string(got) + " nodes, grid has " +
                                         std::to_string(want));
  }
}

}  // namespace

std::vector<double> compute_Z(const PathBundle& path, const TransferKernel& kernel) {
  require_same_grid(path.grid, kernel.grid(), "compute_Z");
  const std::size_t n = path.grid.cells();
  const auto dx = increments(path.x);
  std::vector<double> z(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) z[j] = dot(kernel.column(j), std::span(dx).first(j));
  return z;
}

QRepresentation compute_Q(std::span<const double> z, const QVTable& qv) {
  require_length(z.size(), qv.grid.nodes(), "compute_Q");
  QRepresentation out;
  out.v = ito_sum(qv.psi_diag, z);
  out.q.resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) out.q[k] = 0.5 * (qv.psi_diag[k] * z[k] + out.v[k]);
  return out;
}

std::vector<double> compute_Q_direct(const PathBundle& path, const TransferKernel& kernel, const QVTable& qv) {
  require_same_grid(path.grid, kernel.grid(), "compute_Q_direct");
  require_same_grid(path.grid, qv.grid, "compute_Q_direct");
  const std::size_t n = path.grid.cells();
  const double h = path.grid.step();
  std::vector<double> integral(n + 2, 0.0);
  for (std::size_t j = 1; j <= n + 1; ++j) integral[j] = h * dot(kernel.column(j), std::span(path.x).first(j));
  std::vector<double> q(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double next_bracket = j < n ? qv.bracket[j + 1] : qv.bracket_lookahead;
    q[j] = (integral[j + 1] - integral[j]) / (next_bracket - qv.bracket[j]);
  }
  return q;
}

TransformedPath transform_path(const PathBundle& path, const TransferKernel& kernel, const QVTable& qv) {
  require_same_grid(path.grid, qv.grid, "transform_path");
  auto z = compute_Z(path, kernel);
  auto rep = compute_Q(z, qv);
  return {path.grid, std::move(z), std::move(rep.q), std::move(rep.v)};
}

std::pair<double, double> sufficient_statistics(const TransformedPath& tp, const QVTable& qv) {
  require_same_grid(tp.grid, qv.grid, "sufficient_statistics");
  require_length(tp.q.size(), qv.grid.nodes(), "sufficient_statistics");
  require_length(tp.z.size(), qv.grid.nodes(), "sufficient_statistics");
  const std::size_t n = tp.grid.cells();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += tp.q[i] * (tp.z[i + 1] - tp.z[i]);
    den += 0.5 * (tp.q[i] * tp.q[i] + tp.q[i + 1] * tp.q[i + 1]) * (qv.bracket[i + 1] - qv.bracket[i]);
  }
  return {num, den};
}

namespace {

std::pair<double, double> checked_statistics(const TransformedPath& tp, const QVTable& qv) {
  const auto stats = sufficient_statistics(tp, qv);
  if (!(stats.second > kDegenerateDenominator)) {
    throw Error(Errc::degenerate_path, "integral of Q^2 d<M> is " + csv::number(stats.second));
  }
  return stats;
}

}  // namespace

EstimateRecord mle(const TransformedPath& tp, const QVTable& qv) {
  const auto [num, den] = checked_statistics(tp, qv);
  EstimateRecord rec;
  rec.numerator = num;
  rec.denominator = den;
  rec.theta_hat = -num / den;
  rec.horizon = tp.grid.horizon();
  return rec;
}

double log_likelihood(double theta, const TransformedPath& tp, const QVTable& qv) {
  const auto [num, den] = checked_statistics(tp, qv);
  return -theta * num - 0.5 * theta * theta * den;
}

double score(double theta, const TransformedPath& tp, const QVTable& qv) {
  const auto [num, den] = checked_statistics(tp, qv);
  return -num - theta * den;
}

std::vector<double> reconstruct_X(std::span<const double> z, const InverseKernel& inv) {
  require_length(z.size(), inv.grid().nodes(), "reconstruct_X");
  const std::size_t n = inv.grid().cells();
  const auto dz = increments(z);
  std::vector<double> x(n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) x[j] = dot(inv.column(j), std::span(dz).first(j));
  return x;
}

EstimationPipeline::EstimationPipeline(const ProcessSpec& spec, const KernelOptions& options)
    : sampler_(spec), kernel_(build_kernel(spec, options)), qv_(quadratic_variation(kernel_)) {}

EstimationPipeline::EstimationPipeline(const ProcessSpec& spec, TransferKernel kernel)
    : sampler_(spec), kernel_(std::move(kernel)), qv_(quadratic_variation(kernel_)) {
  require_same_grid(spec.grid, kernel_.grid(), "EstimationPipeline");
  if (kernel_.hurst() != spec.hurst) throw Error(Errc::domain_error, "kernel built for another Hurst index");
}

EstimateRecord EstimationPipeline::run(std::uint64_t master_seed, std::uint64_t rep_id, std::optional<double> drift) const {
  RandomStream rng(master_seed, rep_id);
  const PathBundle path = sampler_.sample(rng, drift.value_or(spec().theta));
  EstimateRecord rec = mle(transform_path(path, kernel_, qv_), qv_);
  rec.hurst = spec().hurst;
  rec.rep_id = rep_id;
  rec.interpolated_kernel = kernel_.interpolated();
  return rec;
}

std::optional<EstimateRecord> EstimationPipeline::try_run(std::uint64_t master_seed, std::uint64_t rep_id,
                                                          std::optional<double> drift) const {
  try {
    return run(master_seed, rep_id, drift);
  } catch (const Error& e) {
    if (e.code() == Errc::degenerate_path) return std::nullopt;
    throw;
  }
}

void write_estimates_header(std::ostream& out) {
  out << "rep_id,H,theta_true,T,n,theta_hat,numerator,denominator,interpolated_kernel\n";
}

void write_estimate_row(std::ostream& out, const EstimateRecord& rec, double theta_true, std::size_t cells) {
  csv::write_row(out, {std::to_string(rec.rep_id), csv::number(rec.hurst), csv::number(theta_true),
                       csv::number(rec.horizon), std::to_string(cells), csv::number(rec.theta_hat),
                       csv::number(rec.numerator), csv::number(rec.denominator), rec.interpolated_kernel ? "1" : "0"});
}

}  // namespace mfou
