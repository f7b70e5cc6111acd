#include "mfou/numerics/grid.hpp"

#include <cmath>
#include <string>

#include "mfou/error.hpp"

namespace mfou {

TimeGrid::TimeGrid(double horizon, std::size_t cells)
    : horizon_(horizon), cells_(cells), step_(horizon / static_cast<double>(cells)) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(Errc::domain_error, "grid horizon must be positive, got " + std::to_string(horizon));
  }
  if (cells < kMinCells) {
    throw Error(Errc::grid_too_coarse,
                "grid needs at least " + std::to_string(kMinCells) + " cells, got " + std::to_string(cells));
  }
}

double TimeGrid::node(std::size_t k) const noexcept {
  if (k == cells_) return horizon_;
  return horizon_ * static_cast<double>(k) / static_cast<double>(cells_);
}

std::vector<double> TimeGrid::node_values() const {
  std::vector<double> out(nodes());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
  return out;
}

std::size_t TimeGrid::index_of(double t) const {
  const double tol = 1e-9 * step_;
  if (t < -tol || t > horizon_ + tol) {
    throw Error(Errc::node_out_of_range, "time " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]");
  }
  const double k = std::round(t / step_);
  return static_cast<std::size_t>(std::max(0.0, std::min(k, static_cast<double>(cells_))));
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) {
    throw Error(Errc::grid_mismatch, std::string(what) + ": grids differ (" + std::to_string(a.cells()) + " vs " +
                                         std::to_string(b.cells()) + " cells)");
  }
}

}  // namespace mfou
