#pragma once

#include <cstdint>

namespace cubeperc {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output finalizer.
constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based hash: the draw for `index` under `seed`. Random access, no state.
constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix_finalize(seed ^ (index * kGoldenGamma));
}

/// Uniform integer in [0, bound) from a 64-bit draw (multiply-shift).
inline std::uint64_t scale_to(std::uint64_t draw, std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(draw) * bound) >> 64);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t draw) noexcept {
  return static_cast<double>(draw >> 11) * 0x1.0p-53;
}

/// Sequential stream over the counter hash, for test and harness sampling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next() noexcept { return mix64(seed_, counter_++); }
  std::uint64_t below(std::uint64_t bound) noexcept { return scale_to(next(), bound); }
  double unit() noexcept { return to_unit(next()); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace cubeperc
