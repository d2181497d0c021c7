#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forge/indexing.hpp"
#include "forge/ingest.hpp"

namespace forge {

enum class Task { Sequential, Straightforward };
enum class Exposure { Seen, Unseen };
enum class Phase { Train, Val, Test };

std::string_view to_string(Task task);
std::string_view to_string(Exposure exposure);
std::string_view to_string(Phase phase);
std::optional<Task> parse_task(std::string_view s);
std::optional<Exposure> parse_exposure(std::string_view s);
std::optional<Phase> parse_phase(std::string_view s);

/// One line of a template file: `task;exposure;input;target`. Placeholders
/// are {dataset}, {user_id}, {history} and {target}.
struct PromptTemplate {
  Task task = Task::Sequential;
  Exposure exposure = Exposure::Seen;
  std::string input_template;
  std::string target_template;
  std::string template_id;  // A1.. for sequential, B1.. for straightforward, in file order

  bool operator==(const PromptTemplate&) const = default;
};

std::vector<PromptTemplate> parse_templates(std::string_view text);

struct Bindings {
  std::string dataset;
  std::optional<std::uint64_t> user_id;
  std::optional<std::vector<TokenSeq>> history;
  std::optional<TokenSeq> target;
};

struct Rendered {
  std::string input;
  std::string target;
};

Rendered render(const PromptTemplate& tmpl, const Bindings& bindings);

struct Example {
  std::string dataset;
  Task task = Task::Sequential;
  std::string template_id;
  Exposure exposure = Exposure::Seen;
  std::string input;
  std::string target;
  std::size_t user_index = 0;

  bool operator==(const Example&) const = default;
};

struct Corpus {
  Phase phase = Phase::Train;
  std::vector<Example> examples;
  /// Train examples left out: empty input history for a sequential prompt,
  /// or a target that repeats the user's val/test item.
  std::size_t skipped = 0;
};

struct CorpusOptions {
  std::optional<Task> task;  // nullopt: both tasks
  Phase phase = Phase::Train;
  std::size_t history_cap = 20;
};

/// Train: input history is train_history minus its last item, which is the
/// target; seen templates only. Val: history = train_history, target =
/// val_target. Test: history = train_history + val_target, target =
/// test_target. Val/test use every template of the task. Examples are
/// ordered by (user index, template order).
Corpus build_corpus(const SplitLog& split, const IndexMap& index, const UserMap& users,
                    std::span<const PromptTemplate> templates, const CorpusOptions& options);

/// Concatenates corpora of one phase (e.g. one per dataset).
Corpus merge_sp5(std::span<const Corpus> corpora);

/// Tab-separated: dataset, task, template_id, exposure, input, target.
std::string write_corpus(const Corpus& corpus);
Corpus read_corpus(std::string_view text, Phase phase);

}  // namespace forge
