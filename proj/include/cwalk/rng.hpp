#pragma once

#include <cstdint>
#include <limits>

namespace cwalk {

/// Counter-based generator keyed by (master_seed, stream_index).
///
/// Output i is mix(key_a + mix(i + key_b)) where mix is the SplitMix64
/// finalizer and (key_a, key_b) are hashed from the seed and stream index.
/// The same (seed, stream) always yields the same sequence, and any stream can
/// be positioned at an arbitrary counter, which is what makes parallel runs
/// reproducible regardless of how samples are scheduled onto threads.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  RandomSource(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  /// Uniform integer in [0, n); n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_a_;
  std::uint64_t key_b_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace cwalk
