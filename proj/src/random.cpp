#include "forge/random.hpp"

#include <vector>

namespace forge {

namespace {

// splitmix64 finalizer, used to spread small seeds before seeding the engine.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(mix(seed)) {}

Rng::Rng(std::initializer_list<std::uint64_t> seeds) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t s : seeds) h = mix(h ^ mix(s));
  engine_.seed(h);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

}  // namespace forge
