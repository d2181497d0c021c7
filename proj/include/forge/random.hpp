#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace forge {

/// Seeded generator whose output sequence is identical on every platform.
/// std::mt19937_64 is fully specified by the standard; the distributions are
/// not, so bounded integers and unit doubles are derived here by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Seeds from several values (e.g. a user seed plus a stream id).
  Rng(std::initializer_list<std::uint64_t> seeds);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1).
  double unit();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace forge
