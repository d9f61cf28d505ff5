#pragma once

#include <cstdint>
#include <random>

namespace aud {

using Rng = std::mt19937_64;

/// Per-trial random draws are split by component so that the realization a
/// method sees never depends on which other methods run in the same trial.
enum class StreamTag : std::uint64_t {
  user_field = 1,
  pilots = 2,
  activity = 3,
  nlos = 4,
  noise = 5,
};

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed split: (master, cell, trial, component) fully determines
/// the stream, so trials can run in any order on any number of threads.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t cell_index,
                                 std::uint64_t trial_index, StreamTag tag) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ cell_index);
  h = mix64(h ^ trial_index);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  return h;
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t cell_index,
                       std::uint64_t trial_index, StreamTag tag) {
  return Rng(derive_seed(master_seed, cell_index, trial_index, tag));
}

}  // namespace aud
