#include "cwalk/rng.hpp"

namespace cwalk {

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RandomSource::RandomSource(std::uint64_t master_seed, std::uint64_t stream_index)
    : seed_(master_seed), stream_(stream_index) {
  constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  const std::uint64_t s = splitmix64_mix(master_seed + kGolden);
  key_a_ = splitmix64_mix(s ^ splitmix64_mix(stream_index * kGolden + 0x2545F4914F6CDD1DULL));
  key_b_ = splitmix64_mix(key_a_ + kGolden) | 1ULL;
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t c = counter_++;
  return splitmix64_mix(key_a_ + splitmix64_mix(c * 0x9E3779B97F4A7C15ULL + key_b_));
}

std::uint64_t RandomSource::below(std::uint64_t n) {
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace cwalk
