#include "mfou/numerics/random.hpp"

#include <cmath>

namespace mfou {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : RandomStream(master_seed, stream_id,
                   mix64(mix64(master_seed + kGolden) ^ mix64(stream_id * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL))) {}

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint64_t key)
    : master_seed_(master_seed), stream_id_(stream_id), key_(key) {}

RandomStream::result_type RandomStream::operator()() noexcept {
  return mix64(key_ + (++counter_) * kGolden);
}

double RandomStream::uniform() noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

RandomStream RandomStream::substream(std::uint64_t index) const {
  return RandomStream(master_seed_, stream_id_, mix64(key_ ^ mix64(index + 0x632BE59BD9B4E019ULL)));
}

}  // namespace mfou
