#include "mfou/error.hpp"

namespace mfou {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::domain_error: return "DomainError";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::grid_too_coarse: return "GridTooCoarse";
    case Errc::grid_mismatch: return "GridMismatch";
    case Errc::node_out_of_range: return "NodeOutOfRange";
    case Errc::node_set_too_large: return "NodeSetTooLarge";
    case Errc::not_positive_definite: return "NotPositiveDefinite";
    case Errc::singular: return "Singular";
    case Errc::solve_failed: return "SolveFailed";
    case Errc::residual_too_large: return "ResidualTooLarge";
    case Errc::embedding_failed: return "EmbeddingFailed";
    case Errc::non_monotone_bracket: return "NonMonotoneBracket";
    case Errc::degenerate_path: return "DegeneratePath";
    case Errc::psi_not_positive: return "PsiNotPositive";
    case Errc::blow_up: return "BlowUp";
    case Errc::non_positive_det: return "NonPositiveDet";
    case Errc::complex_eigenvalues: return "ComplexEigenvalues";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool Error::is_numerical() const noexcept {
  switch (code_) {
    case Errc::not_positive_definite:
    case Errc::singular:
    case Errc::solve_failed:
    case Errc::residual_too_large:
    case Errc::embedding_failed:
    case Errc::non_monotone_bracket:
    case Errc::degenerate_path:
    case Errc::psi_not_positive:
    case Errc::blow_up:
    case Errc::non_positive_det:
    case Errc::complex_eigenvalues:
      return true;
    default:
      return false;
  }
}

}  // namespace mfou
