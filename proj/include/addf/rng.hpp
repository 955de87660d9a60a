// rng.hpp -- seeded random draws with a splittable stream scheme.
//
// All stochastic code in the library draws through Rng, which converts the
// raw 64-bit engine output itself instead of going through std::
// distributions, so a given seed replays the same sequence on any platform.

#ifndef ADDF_RNG_HPP
#define ADDF_RNG_HPP

#include <cstdint>
#include <random>

namespace addf {

// One SplitMix64 step; `state` advances in place.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives the seed of an independent stream (agent, season, sweep replica)
// from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master + (stream + 1) * 0x9e3779b97f4a7c15ull;
  (void)splitmix64(s);
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n). Requires n >= 1; modulo bias is negligible for
  // the small ranges used here.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace addf

#endif
