#pragma once

#include <cstdint>
#include <limits>

namespace probevol {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
///
/// Streams are addressed by counter: stream_seed(master, a, b) gives an
/// independent starting state for every (trial, site) coordinate, so draws
/// never depend on how work is scheduled across threads.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
  std::uint64_t h = CounterRng::mix(master ^ 0x6A09E667F3BCC909ULL);
  h = CounterRng::mix(h ^ (a + 0x9E3779B97F4A7C15ULL));
  h = CounterRng::mix(h ^ (b + 0xBB67AE8584CAA73BULL));
  return h;
}

/// Uniform double on [0, 1) with 53 random bits.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double on the open interval (0, 1).
template <class Rng>
double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace probevol
