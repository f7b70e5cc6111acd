#include "mfou/numerics/quadrature.hpp"

#include <string>

#include "mfou/error.hpp"

namespace mfou {

double trapezoid_integral(std::span<const double> values, const TimeGrid& grid) {
  if (values.size() != grid.nodes()) {
    throw Error(Errc::length_mismatch, "trapezoid: " + std::to_string(values.size()) + " values for " +
                                           std::to_string(grid.nodes()) + " nodes");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) acc += values[i] + values[i + 1];
  return 0.5 * grid.step() * acc;
}

double trapezoid_integral(std::span<const double> values, std::span<const double> increments) {
  if (values.size() != increments.size() + 1) {
    throw Error(Errc::length_mismatch, "trapezoid: need one more value than integrator increments");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) acc += 0.5 * (values[i] + values[i + 1]) * increments[i];
  return acc;
}

std::vector<double> ito_sum(std::span<const double> integrand, std::span<const double> integrator) {
  if (integrand.size() != integrator.size()) {
    throw Error(Errc::length_mismatch, "ito_sum: integrand and integrator lengths differ");
  }
  std::vector<double> out(integrand.size(), 0.0);
  for (std::size_t k = 1; k < out.size(); ++k) {
    out[k] = out[k - 1] + integrand[k - 1] * (integrator[k] - integrator[k - 1]);
  }
  return out;
}

std::vector<double> finite_diff_derivative(std::span<const double> values, const TimeGrid& grid) {
  if (values.size() != grid.nodes()) {
    throw Error(Errc::length_mismatch, "finite_diff_derivative: value count does not match grid");
  }
  const std::size_t n = values.size();
  const double h = grid.step();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
  d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> increments(std::span<const double> values) {
  std::vector<double> out(values.empty() ? 0 : values.size() - 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values[i + 1] - values[i];
  return out;
}

}  // namespace mfou
