#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace wirehead {

// One splitmix64 step. Used both as a stream of mixed words and as the
// avalanche function that folds coordinates into seed material.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a word sequence into one seed. Nearby inputs land far apart, so
// per-cell streams derived from adjacent coordinates are unrelated.
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t state = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t w : words) {
    state ^= splitmix64_next(state) + w;
    (void)splitmix64_next(state);
  }
  std::uint64_t final_state = state;
  return splitmix64_next(final_state);
}

// Deterministic random stream. mt19937_64 output is specified bit for bit by
// the language standard; doubles and indices are constructed explicitly here
// rather than through library distributions, whose algorithms vary between
// standard-library implementations. Logs built on this stream are therefore
// byte-identical across platforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1} via 128-bit multiply-shift; n >= 1.
  std::size_t uniform_index(std::size_t n);

  // Inverse-CDF draw from an explicit probability vector. The vector must be
  // nonnegative and sum to ~1; the final index absorbs rounding slack.
  std::size_t sample_discrete(const std::vector<double>& probs);

 private:
  std::mt19937_64 engine_;
};

}  // namespace wirehead
