#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "forge/collab.hpp"
#include "forge/eval.hpp"
#include "forge/indexing.hpp"
#include "forge/ingest.hpp"

namespace forge::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kDataError = 1, kUsageError = 2 };

/// Entry point of the `forge` tool. Returns the process exit status.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

// Split directory: train.txt (line format, train histories only),
// val.txt / test.txt (truth files), users.txt (user map), meta.txt.
struct SplitDir {
  SplitLog split;
  UserMap users;
  std::string train_text, val_text, test_text;  // for provenance digests
};

void write_split_dir(const fs::path& dir, const InteractionLog& log, const SplitLog& split,
                     const std::string& header);
SplitDir read_split_dir(const fs::path& dir);

/// Value of `key=` in the first provenance line of `text`, if any.
std::string header_value(std::string_view text, std::string_view key);

struct RunConfig {
  fs::path input;
  std::string dataset;
  fs::path out;
  fs::path templates;
  std::vector<IndexMethod> methods{IndexMethod::Random, IndexMethod::Sequential,
                                   IndexMethod::Collaborative};
  std::uint64_t seed = 42;
  std::uint64_t start_id = kDefaultStartId;
  CollabConfig collab{};
  std::size_t history_cap = 20;
  std::size_t batch_size = 64;
  std::vector<std::size_t> ks{5, 10};
  std::size_t k = 10;
  std::size_t beam = 20;
  double alpha = 1.0;
  std::size_t threads = 1;
};

struct PipelineReport {
  std::map<IndexMethod, Metrics> metrics;  // test-phase metrics per method
  std::vector<fs::path> artifacts;
};

/// ingest -> index (each method) -> prompts -> schedule -> generate -> eval.
PipelineReport run_pipeline(const RunConfig& config);

}  // namespace forge::cli
