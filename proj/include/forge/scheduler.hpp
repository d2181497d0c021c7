#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "forge/prompts.hpp"

namespace forge {

struct Batch {
  std::string dataset;
  Task task = Task::Sequential;
  std::vector<std::size_t> indices;  // into the planned corpus

  bool operator==(const Batch&) const = default;
};

struct BatchPlan {
  std::vector<Batch> batches;
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
};

/// Task- and dataset-homogeneous batches for multi-task training.
///
/// Examples are grouped by (dataset, task), groups ordered lexicographically.
/// Each group's examples are shuffled and cut into batches (the last one may
/// be short). Batches are emitted round-robin, one per group per round; a
/// group that runs out starts a freshly shuffled epoch. The plan stops after
/// the round in which the largest group finishes its first epoch.
BatchPlan plan_batches(const Corpus& corpus, std::size_t batch_size, std::uint64_t seed);

/// One line per batch: dataset<TAB>task<TAB>i,j,k
std::string write_plan(const BatchPlan& plan);

}  // namespace forge
