#pragma once

// File-to-file pipeline steps shared by the subcommands and `pipeline`.

#include <optional>
#include <string>
#include <vector>

#include "forge/cli.hpp"
#include "forge/prompts.hpp"
#include "forge/scheduler.hpp"

namespace forge::cli::steps {

/// Returns the stats summary text.
std::string ingest(const fs::path& input, const std::string& dataset, const fs::path& out);

std::string stats(const fs::path& input, const std::string& dataset);

struct IndexArgs {
  fs::path split_dir;
  IndexMethod method = IndexMethod::Sequential;
  std::uint64_t seed = 42;
  std::uint64_t start_id = kDefaultStartId;
  CollabConfig collab{};
  fs::path out;
  std::optional<fs::path> dump_tree;
};
IndexMap index(const IndexArgs& args);

struct PromptArgs {
  fs::path split_dir;
  fs::path index;
  fs::path templates;
  std::optional<Task> task;
  Phase phase = Phase::Train;
  std::size_t history_cap = 20;
  fs::path out;
};
Corpus prompts(const PromptArgs& args);

BatchPlan schedule(const std::vector<fs::path>& corpora, std::size_t batch_size,
                   std::uint64_t seed, const fs::path& out);

struct GenerateArgs {
  fs::path split_dir;
  fs::path index;
  std::size_t k = 10;
  std::size_t beam = 20;
  double alpha = 1.0;
  Phase phase = Phase::Test;
  std::optional<fs::path> candidates;
  std::size_t threads = 1;
  fs::path out;
};
std::vector<RankedList> generate(const GenerateArgs& args);

struct EvalArgs {
  fs::path predictions;
  fs::path truth;
  std::vector<std::size_t> ks{5, 10};
  std::optional<fs::path> index;
  std::optional<fs::path> out;
};
/// Returns the metrics; *report receives the formatted table.
Metrics eval(const EvalArgs& args, std::string* report);

}  // namespace forge::cli::steps
