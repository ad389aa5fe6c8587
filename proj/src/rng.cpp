#include "wirehead/rng.hpp"

#include "wirehead/errors.hpp"

namespace wirehead {

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n == 0) throw UsageError("uniform_index: n must be >= 1");
  const auto x = static_cast<unsigned __int128>(next_u64());
  return static_cast<std::size_t>((x * n) >> 64);
}

std::size_t RandomStream::sample_discrete(const std::vector<double>& probs) {
  if (probs.empty()) throw UsageError("sample_discrete: empty distribution");
  const double u = uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return probs.size() - 1;
}

}  // namespace wirehead
