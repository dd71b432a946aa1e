#pragma once

#include "risnoma/core.hpp"

#include <cstdint>
#include <random>

namespace risnoma {

using Rng = std::mt19937_64;

/// Purpose of a random substream. Each purpose gets an independent stream per trial so that
/// schemes evaluated on the same trial see identical channels.
enum class StreamTag : std::uint64_t {
  geometry = 1,
  channels = 2,
  noise_directions = 3,
  csi_error = 4,
  generic = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for (master seed, trial, purpose). Depends only on its arguments, never on
/// evaluation order or thread count.
inline Rng substream(std::uint64_t seed, std::uint64_t trial, StreamTag tag) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

/// Circularly-symmetric complex Gaussian sample with the given mean and total variance.
inline Complex complex_normal(Rng& rng, Complex mean, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return mean + Complex{re, im};
}

inline CVector complex_normal_vector(Rng& rng, Index n) {
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = complex_normal(rng, {0.0, 0.0}, 1.0);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace risnoma
