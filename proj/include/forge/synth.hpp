#pragma once

#include <cstddef>
#include <cstdint>

#include "forge/ingest.hpp"

namespace forge {

/// Synthetic interaction log with planted first-order structure: items sit on
/// a hidden ring and a user's next item is one of the three ring successors
/// of the current one with probability `follow`, otherwise uniform.
struct SynthConfig {
  std::size_t users = 1000;
  std::size_t items = 2000;
  std::size_t min_length = 8;
  std::size_t max_length = 30;
  double follow = 0.8;
  std::uint64_t seed = 7;
};

InteractionLog synth_markov(const SynthConfig& config, std::string dataset_name = "Synthetic");

}  // namespace forge
