#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pmf {

// Advances a SplitMix64 state and returns the next output. Used to derive
// independent substream seeds from one user seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Seeded random stream. Sampling is implemented here (not through the
// standard distributions) so sequences are identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  // Inverse-CDF draw from a probability vector. Zero-mass entries are never
  // returned.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

// The three independent streams an episode consumes.
struct EpisodeStreams {
  Rng forecaster;
  Rng environment;
  Rng signal;

  static EpisodeStreams split(std::uint64_t seed);
};

}  // namespace pmf
