#pragma once

#include <cstdint>
#include <random>

namespace hodstat {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent, stable sub-streams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream purposes. Values are part of the reproducibility contract; do not renumber.
enum class StreamTag : std::uint64_t {
  mobility = 1,
  strategy = 2,
  jitter = 3,
  population = 4,
};

// Seed for the stream (run seed, purpose, entity id). Adding entities never
// shifts the seeds of existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t run_seed, StreamTag tag, std::uint64_t entity) {
  return mix64(mix64(mix64(run_seed) ^ static_cast<std::uint64_t>(tag)) ^ entity);
}

inline Rng make_stream(std::uint64_t run_seed, StreamTag tag, std::uint64_t entity) {
  return Rng{derive_seed(run_seed, tag, entity)};
}

// Uniform real on [lo, hi]; returns lo exactly when lo == hi.
inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>{lo, hi}(rng);
}

}  // namespace hodstat
