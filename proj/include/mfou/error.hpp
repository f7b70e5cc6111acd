#pragma once

#include <stdexcept>
#include <string>

namespace mfou {

enum class Errc {
  domain_error,
  length_mismatch,
  grid_too_coarse,
  grid_mismatch,
  node_out_of_range,
  node_set_too_large,
  not_positive_definite,
  singular,
  solve_failed,
  residual_too_large,
  embedding_failed,
  non_monotone_bracket,
  degenerate_path,
  psi_not_positive,
  blow_up,
  non_positive_det,
  complex_eigenvalues,
  config_error,
  io_error,
};

const char* to_string(Errc code) noexcept;

/// Exception carrying one of the library error codes. Numerical failures
/// (solver breakdown, indefinite covariances, blow-ups) are distinguished
/// from input validation failures so the CLI can map them to exit codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  bool is_numerical() const noexcept;

 private:
  Errc code_;
};

}  // namespace mfou
