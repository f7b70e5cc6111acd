#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mfou/transform.hpp"

namespace mfou::ldp {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

struct RiccatiMatrices {
  Mat2 A;  // [[1, 1/ψ], [ψ, 1]]
  Vec2 b;  // [1/√ψ, √ψ]
  Mat2 R;  // [[ψ, 1], [1, 1/ψ]] = J·A
  Mat2 B;  // b·bᵀ = A·J
};

/// Coefficient matrices for a given ψ(t,t). Throws PsiNotPositive.
RiccatiMatrices riccati_matrices(double psi);
RiccatiMatrices riccati_matrices(double t, const QVTable& qv);

/// J = [[0, 1], [1, 0]].
Mat2 swap_matrix();

struct OdeOptions {
  double local_tolerance = 1e-8;
  int max_refinement = 6;       // up to 2^6 substeps per grid cell
  double blowup_threshold = 1e12;
};

/// Γ̇ = −(θ/2)AΓ − (θ/2)ΓAᵀ − (μ/2)ΓRΓ + B on the node grid of `qv`.
struct RiccatiRun {
  double theta = 0.0;
  double mu = 0.0;
  TimeGrid grid;                  // the qv grid
  std::size_t last_node = 0;      // integration stopped at this node
  std::vector<Mat2> gamma{};        // Γ(t_k), k = 0..last_node; Γ(0) = 0
  std::vector<double> trace_gamma_r{};
  std::vector<double> k_values{};   // K_{t_k}(μ), k = 0..last_node (k_values[0] = 0)
  bool blew_up = false;
  double blowup_time = 0.0;
  int max_refinement_used = 0;
  double min_eigenvalue = 0.0;    // smallest eigenvalue of Γ seen along the run
};

/// RK4 from t₁ = Δ with Γ(t₁) = B(t₁)Δ up to the node nearest T. A blow-up is
/// recorded in the run rather than thrown.
RiccatiRun solve_riccati(double theta, double mu, const QVTable& qv, double horizon,
                         const OdeOptions& options = {});

/// −(μ/4T)∫₀ᵀ tr(ΓR) dt by the trapezoid rule. Throws BlowUp when the run
/// did not reach its horizon.
double k_T_via_riccati(const RiccatiRun& run);
/// K at an intermediate node (the solution on [0, t_k] does not depend on
/// where the run stops).
double k_T_via_riccati(const RiccatiRun& run, std::size_t node);

/// Ψ̇₁ = (θ/2)Ψ₁A + (μ/2)Ψ₂R, Ψ̇₂ = Ψ₁B − (θ/2)Ψ₂Aᵀ started at t₁ with
/// Ψ₁ = I, Ψ₂ = B(t₁)Δ. The system is linear with Ψ multiplied from the right,
/// so a constant left factor C applied to both Ψ₁ and Ψ₂ leaves it and Γ = Ψ₁⁻¹Ψ₂
/// unchanged. After every cell both are multiplied by the current Ψ₁⁻¹: one
/// singular value of Ψ₁ grows like e^{θt} and the other stays O(1), so the
/// determinant of an unfactored Ψ₁ is lost to cancellation for large θT.
struct LinearizedRun {
  double theta = 0.0;
  double mu = 0.0;
  TimeGrid grid;
  std::size_t last_node = 0;
  std::vector<Mat2> psi1{};          // C_k·Ψ at nodes 1..last_node (index 0 unused)
  std::vector<Mat2> psi2{};
  std::vector<double> log_det_factor{};  // log|det C_k⁻¹|
  std::vector<double> log_det_psi1{};    // log|det Ψ₁(t_k)|
  std::vector<double> det_sign{};        // sign of det Ψ₁(t_k)
  bool det_positive = true;          // det Ψ₁ > 0 at every node
  double head_trace = 0.0;         // tr(Γ(t₁)R(t₁))

  Mat2 gamma(std::size_t k) const;
};

LinearizedRun solve_linearized(double theta, double mu, const QVTable& qv, double horizon,
                               const OdeOptions& options = {});

/// −(1/2T)log det Ψ₁(T) + θ(T − t₁)/(2T), plus the trapezoid share of the
/// first cell, −(μ/4T)(Δ/2)tr(Γ(t₁)R(t₁)). Throws NonPositiveDet.
double k_T_via_liouville(const LinearizedRun& run);
double k_T_via_liouville(const LinearizedRun& run, std::size_t node);
double k_T_via_liouville(double theta, double mu, const QVTable& qv, double horizon,
                         const OdeOptions& options = {});

/// Ṁ = λ(AM + MA), M(0) = −I, started at t₁ with one Euler step.
struct MEquationRun {
  double lambda = 0.0;
  TimeGrid grid;
  std::size_t last_node = 0;
  std::vector<double> log_abs_trace{};  // log|tr M(t_k)|
  std::vector<double> trace_sign{};
  std::vector<double> bound_ratio{};    // |tr M| / (2√2 e^{2λt})
  double max_bound_ratio = 0.0;
  double worst_time = 0.0;

  double trace(std::size_t k) const;
};

MEquationRun solve_M_equation(double lambda, const QVTable& qv, double horizon,
                              const OdeOptions& options = {});

}  // namespace mfou::ldp
