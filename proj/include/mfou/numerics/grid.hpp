#pragma once

#include <cstddef>
#include <vector>

namespace mfou {

/// Uniform discretization t_k = k T / n of [0, T], k = 0..n.
class TimeGrid {
 public:
  static constexpr std::size_t kMinCells = 8;

  TimeGrid(double horizon, std::size_t cells);

  double horizon() const noexcept { return horizon_; }
  std::size_t cells() const noexcept { return cells_; }
  std::size_t nodes() const noexcept { return cells_ + 1; }
  double step() const noexcept { return step_; }

  /// t_k; the last node is exactly the horizon.
  double node(std::size_t k) const noexcept;
  std::vector<double> node_values() const;

  /// Nearest node index, throws NodeOutOfRange outside [0, T].
  std::size_t index_of(double t) const;

  bool operator==(const TimeGrid& other) const noexcept {
    return cells_ == other.cells_ && horizon_ == other.horizon_;
  }

 private:
  double horizon_;
  std::size_t cells_;
  double step_;
};

/// Throws GridMismatch unless the two grids are identical.
void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what);

}  // namespace mfou
