#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace levyfilter {

/// Path-level generator. Every stochastic entry point takes a caller-owned
/// generator; nothing in the library holds global random state.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to derive independent seeds from tuples.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
  return mix64(mix64(mix64(mix64(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL)) ^
               (c * 0x85157af5ULL + 0x2545f4914f6cdd1dULL));
}

/// Cheap counter-style stream (SplitMix64). Used where one stream per
/// (particle, step) is needed and seeding a Mersenne twister would dominate.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t seed) noexcept : state_(seed) {}
  StreamRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) noexcept
      : state_(derive_seed(seed, a, b, c)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Uniform draw on the open interval (0, 1).
template <std::uniform_random_bit_generator G>
double uniform_open(G& g) {
  static_assert(G::max() - G::min() == std::numeric_limits<std::uint64_t>::max(),
                "uniform_open expects a 64-bit generator");
  return (static_cast<double>((g() - G::min()) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace levyfilter
