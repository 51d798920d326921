#pragma once

#include <cstdint>
#include <random>

namespace manip {

// Deterministic substream derivation: every stochastic operation owns a
// (seed, stream) pair and derives one engine per element index, so results
// do not depend on thread count or iteration order.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngStream() = default;
  RngStream(std::uint64_t seed_, std::uint64_t stream_) : seed(seed_), stream(stream_) {}

  // Engine for element `index` of this stream.
  std::mt19937_64 at(std::uint64_t index) const {
    std::uint64_t s = splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
    return std::mt19937_64(splitmix64(s ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL)));
  }

  // A child stream, for operations that fan out further.
  RngStream child(std::uint64_t substream) const {
    return RngStream(splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL)), substream);
  }
};

inline double gauss(std::mt19937_64& eng, double sigma = 1.0) {
  std::normal_distribution<double> d(0.0, 1.0);
  return sigma * d(eng);
}

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(eng);
}

}  // namespace manip
