#include "pmf/rng.hpp"

namespace pmf {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::categorical(std::span<const double> probs) {
  const double u = uniform();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = k;
    cumulative += probs[k];
    if (u < cumulative) return k;
  }
  // Rounding left the cumulative sum slightly below one.
  return last_positive;
}

EpisodeStreams EpisodeStreams::split(std::uint64_t seed) {
  std::uint64_t state = seed;
  const std::uint64_t f = splitmix64(state);
  const std::uint64_t e = splitmix64(state);
  const std::uint64_t s = splitmix64(state);
  return EpisodeStreams{Rng(f), Rng(e), Rng(s)};
}

}  // namespace pmf
