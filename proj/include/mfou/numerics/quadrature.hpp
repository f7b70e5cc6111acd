#pragma once

#include <span>
#include <vector>

#include "mfou/numerics/grid.hpp"

namespace mfou {

/// Trapezoid rule for ∫ f dt over the grid; `values` holds f at the n+1 nodes.
double trapezoid_integral(std::span<const double> values, const TimeGrid& grid);

/// Trapezoid rule for ∫ f dG given f at the n+1 nodes and the n integrator
/// increments G(t_{i+1}) − G(t_i).
double trapezoid_integral(std::span<const double> values, std::span<const double> increments);

/// Left-point Riemann–Stieltjes running sums
///   S_0 = 0,  S_k = Σ_{i<k} f(t_i) (G(t_{i+1}) − G(t_i)),
/// the Itô convention for martingale integrators.
std::vector<double> ito_sum(std::span<const double> integrand, std::span<const double> integrator);

/// Second-order derivative on a uniform grid: central differences inside,
/// one-sided three-point stencils at both ends.
std::vector<double> finite_diff_derivative(std::span<const double> values, const TimeGrid& grid);

/// Successive differences v_{i+1} − v_i.
std::vector<double> increments(std::span<const double> values);

}  // namespace mfou
