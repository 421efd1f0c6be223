#pragma once

#include <cstdint>
#include <random>

namespace mfbai {

/// Seeded random stream. A (seed, stream id) pair fully determines the sequence.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which are
/// specified bit-exactly by the standard. Uniform and normal variates are derived
/// here rather than through <random> distributions, whose algorithms are left to
/// the library vendor.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Standard normal variate (Box-Muller, no caching).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace mfbai
