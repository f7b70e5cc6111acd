#pragma once

#include <optional>

namespace mfou::ldp {

/// lim_T L_T(a,b) = −½(a − θ + √(θ² − 2b)); nullopt outside θ² − 2b > 0.
std::optional<double> cgf_limit(double a, double b, double theta);

/// lim_T K_T(μ) = θ/2 − √(θ²/4 + μ/2); nullopt unless μ > −θ²/2.
std::optional<double> k_limit(double mu, double theta);

/// The two-branch rate function exactly as printed:
///   −(x+θ)²/(4x) for x < −θ/3,  2x + θ otherwise.
double rate_function_printed(double x, double theta);

/// How the second CGF argument is tied to the candidate value x.
enum class SignConvention {
  printed,   // b = −x a, zero of the rate at x = −θ
  chernoff,  // b = +x a, from {θ̂ ≤ x} = {∫Q dZ + x ∫Q² d⟨M⟩ ≥ 0}
};
const char* to_string(SignConvention c) noexcept;

struct RateQuery {
  double x = 0.0;
  double theta = 1.0;
  SignConvention convention = SignConvention::printed;
  double search_limit = 1e6;  // |a| never exceeds this
};

struct RateResult {
  double value = 0.0;   // −inf_a L_x(a); +inf when unbounded below
  double argmin = 0.0;  // minimizing a (or last point reached)
  bool at_boundary = false;
  bool unbounded_below = false;
  SignConvention convention = SignConvention::printed;
};

/// Numerical −inf over Δ_x of L_x(a) = cgf_limit(a, b(a), θ): geometric
/// bracket expansion from a = 0, then golden-section refinement to 1e-10.
RateResult rate_function_numeric(const RateQuery& q);

struct EigenSplit {
  double lambda;
  double a_plus;
  double a_minus;
};

/// λ = √(θ²/4 + μ/2), a± = θ/2 ± λ. Throws ComplexEigenvalues.
EigenSplit eigen_split(double theta, double mu);

/// log dP_φ/dP = (φ+θ)∫Q dZ − ((φ² − θ²)/2)∫Q² d⟨M⟩.
double girsanov_log_weight(double phi, double theta, double numerator, double denominator);

}  // namespace mfou::ldp
