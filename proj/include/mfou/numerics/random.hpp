#pragma once

#include <cstdint>
#include <limits>

namespace mfou {

/// Counter-based random stream. Output k of stream (seed, id) is a pure
/// function of (seed, id, k), so replications can be drawn in any order or on
/// any thread and still reproduce bit for bit.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal (Marsaglia polar method; the spare variate is kept).
  double normal() noexcept;

  /// Independent child stream, keyed by this stream's key and `index`.
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint64_t key);

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mfou
