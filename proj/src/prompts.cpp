#include "forge/prompts.hpp"

#include <algorithm>
#include <array>

#include "forge/error.hpp"
#include "forge/text.hpp"

namespace forge {

namespace {

constexpr std::string_view kModule = "prompts";
constexpr std::array<std::string_view, 4> kPlaceholders = {"dataset", "user_id", "history",
                                                           "target"};

// Calls on_literal / on_placeholder for each piece of a template.
template <typename Literal, typename Placeholder>
void scan(std::string_view tmpl, Literal&& on_literal, Placeholder&& on_placeholder) {
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      on_literal(tmpl.substr(pos));
      return;
    }
    on_literal(tmpl.substr(pos, open - pos));
    const std::size_t close = tmpl.find('}', open + 1);
    if (close == std::string_view::npos)
      throw Error(ErrorKind::UnknownPlaceholder, kModule,
                  "unterminated placeholder in '" + std::string(tmpl) + "'");
    on_placeholder(tmpl.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
}

std::vector<std::string_view> placeholders(std::string_view tmpl) {
  std::vector<std::string_view> names;
  scan(tmpl, [](std::string_view) {}, [&](std::string_view name) {
    if (std::find(kPlaceholders.begin(), kPlaceholders.end(), name) == kPlaceholders.end())
      throw Error(ErrorKind::UnknownPlaceholder, kModule,
                  "unknown placeholder {" + std::string(name) + "}");
    names.push_back(name);
  });
  return names;
}

bool contains(const std::vector<std::string_view>& names, std::string_view name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string join_history(const std::vector<TokenSeq>& history) {
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i) out += ' ';
    out += history[i].joined();
  }
  return out;
}

std::string substitute(std::string_view tmpl, const Bindings& b) {
  std::string out;
  scan(tmpl, [&](std::string_view lit) { out += lit; }, [&](std::string_view name) {
    auto unbound = [&] {
      return Error(ErrorKind::UnboundPlaceholder, kModule,
                   "no binding for {" + std::string(name) + "}");
    };
    if (name == "dataset") {
      out += b.dataset;
    } else if (name == "user_id") {
      if (!b.user_id) throw unbound();
      out += std::to_string(*b.user_id);
    } else if (name == "history") {
      if (!b.history) throw unbound();
      out += join_history(*b.history);
    } else if (name == "target") {
      if (!b.target) throw unbound();
      out += b.target->joined();
    } else {
      throw Error(ErrorKind::UnknownPlaceholder, kModule,
                  "unknown placeholder {" + std::string(name) + "}");
    }
  });
  return out;
}

const TokenSeq& lookup(const IndexMap& index, const std::string& raw) {
  const TokenSeq* seq = index.find(raw);
  if (!seq) throw Error(ErrorKind::MissingIndexEntry, kModule, "item " + raw + " is not indexed");
  return *seq;
}

std::vector<TokenSeq> capped_history(const IndexMap& index, std::span<const std::string> items,
                                     std::size_t cap) {
  const std::size_t skip = items.size() > cap ? items.size() - cap : 0;
  std::vector<TokenSeq> out;
  out.reserve(items.size() - skip);
  for (std::size_t i = skip; i < items.size(); ++i) out.push_back(lookup(index, items[i]));
  return out;
}

}  // namespace

std::string_view to_string(Task task) {
  return task == Task::Sequential ? "sequential" : "straightforward";
}
std::string_view to_string(Exposure exposure) {
  return exposure == Exposure::Seen ? "seen" : "unseen";
}
std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Train: return "train";
    case Phase::Val: return "val";
    case Phase::Test: return "test";
  }
  return "train";
}

std::optional<Task> parse_task(std::string_view s) {
  if (s == "sequential") return Task::Sequential;
  if (s == "straightforward") return Task::Straightforward;
  return std::nullopt;
}
std::optional<Exposure> parse_exposure(std::string_view s) {
  if (s == "seen") return Exposure::Seen;
  if (s == "unseen") return Exposure::Unseen;
  return std::nullopt;
}
std::optional<Phase> parse_phase(std::string_view s) {
  if (s == "train") return Phase::Train;
  if (s == "val") return Phase::Val;
  if (s == "test") return Phase::Test;
  return std::nullopt;
}

std::vector<PromptTemplate> parse_templates(std::string_view text) {
  std::vector<PromptTemplate> out;
  std::size_t seq_count = 0, sf_count = 0, line_no = 0;
  for (std::string_view line : text::lines(text)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    auto fields = text::split_exact(line, ';');
    if (fields.size() != 4)
      throw Error(ErrorKind::BadFieldCount, kModule,
                  where + "expected 4 ';'-separated fields, got " + std::to_string(fields.size()));
    PromptTemplate t;
    auto task = parse_task(fields[0]);
    if (!task) throw Error(ErrorKind::UnknownTask, kModule, where + "task '" + std::string(fields[0]) + "'");
    auto exposure = parse_exposure(fields[1]);
    if (!exposure)
      throw Error(ErrorKind::UnknownExposure, kModule, where + "exposure '" + std::string(fields[1]) + "'");
    t.task = *task;
    t.exposure = *exposure;
    t.input_template = std::string(fields[2]);
    t.target_template = std::string(fields[3]);
    if (t.input_template.find('\t') != std::string::npos ||
        t.target_template.find('\t') != std::string::npos)
      throw Error(ErrorKind::InvalidTemplate, kModule, where + "templates may not contain tabs");

    const auto in_names = placeholders(t.input_template);
    const auto out_names = placeholders(t.target_template);
    if (!contains(in_names, "dataset") || !contains(out_names, "dataset"))
      throw Error(ErrorKind::InvalidTemplate, kModule,
                  where + "input and target must both mention {dataset}");
    if (!contains(out_names, "target"))
      throw Error(ErrorKind::InvalidTemplate, kModule, where + "target template lacks {target}");
    if (contains(in_names, "target"))
      throw Error(ErrorKind::InvalidTemplate, kModule, where + "input template leaks {target}");
    const bool has_history = contains(in_names, "history") || contains(out_names, "history");
    if (t.task == Task::Sequential && !has_history)
      throw Error(ErrorKind::InvalidTemplate, kModule, where + "sequential template lacks {history}");
    if (t.task == Task::Straightforward && has_history)
      throw Error(ErrorKind::InvalidTemplate, kModule,
                  where + "straightforward template may not use {history}");

    t.template_id = t.task == Task::Sequential ? "A" + std::to_string(++seq_count)
                                               : "B" + std::to_string(++sf_count);
    out.push_back(std::move(t));
  }
  return out;
}

Rendered render(const PromptTemplate& tmpl, const Bindings& bindings) {
  return {substitute(tmpl.input_template, bindings), substitute(tmpl.target_template, bindings)};
}

Corpus build_corpus(const SplitLog& split, const IndexMap& index, const UserMap& users,
                    std::span<const PromptTemplate> templates, const CorpusOptions& options) {
  Corpus corpus;
  corpus.phase = options.phase;

  std::vector<const PromptTemplate*> chosen;
  for (const auto& t : templates) {
    if (options.task && t.task != *options.task) continue;
    if (options.phase == Phase::Train && t.exposure != Exposure::Seen) continue;
    chosen.push_back(&t);
  }

  struct Row {
    std::size_t user_index;
    std::size_t template_rank;
    Example example;
  };
  std::vector<Row> rows;
  for (const auto& u : split.users) {
    const auto user_index = users.find(u.raw_user_id);
    if (!user_index)
      throw Error(ErrorKind::MissingIndexEntry, kModule, "user " + u.raw_user_id + " has no index");

    Bindings b;
    b.dataset = split.dataset_name;
    b.user_id = *user_index;
    std::vector<std::string> history_items;
    const std::string* target_item = nullptr;
    switch (options.phase) {
      case Phase::Train:
        history_items.assign(u.train_history.begin(), u.train_history.end() - 1);
        target_item = &u.train_history.back();
        break;
      case Phase::Val:
        history_items = u.train_history;
        target_item = &u.val_target;
        break;
      case Phase::Test:
        history_items = u.train_history;
        history_items.push_back(u.val_target);
        target_item = &u.test_target;
        break;
    }
    b.history = capped_history(index, history_items, options.history_cap);
    b.target = lookup(index, *target_item);
    const bool leaks = options.phase == Phase::Train &&
                       (*target_item == u.val_target || *target_item == u.test_target);

    for (std::size_t r = 0; r < chosen.size(); ++r) {
      const PromptTemplate& t = *chosen[r];
      if (options.phase == Phase::Train &&
          (leaks || (t.task == Task::Sequential && b.history->empty()))) {
        ++corpus.skipped;
        continue;
      }
      Rendered text = render(t, b);
      rows.push_back({*user_index, r,
                      Example{split.dataset_name, t.task, t.template_id, t.exposure,
                              std::move(text.input), std::move(text.target), *user_index}});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.user_index != b.user_index) return a.user_index < b.user_index;
    return a.template_rank < b.template_rank;
  });
  corpus.examples.reserve(rows.size());
  for (auto& r : rows) corpus.examples.push_back(std::move(r.example));
  return corpus;
}

Corpus merge_sp5(std::span<const Corpus> corpora) {
  Corpus merged;
  if (corpora.empty()) return merged;
  merged.phase = corpora.front().phase;
  for (const auto& c : corpora) {
    if (c.phase != merged.phase)
      throw Error(ErrorKind::MixedPhase, kModule,
                  "cannot merge " + std::string(to_string(c.phase)) + " corpus into " +
                      std::string(to_string(merged.phase)) + " corpus");
    merged.examples.insert(merged.examples.end(), c.examples.begin(), c.examples.end());
    merged.skipped += c.skipped;
  }
  return merged;
}

std::string write_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& e : corpus.examples) {
    out += e.dataset;
    out += '\t';
    out += to_string(e.task);
    out += '\t';
    out += e.template_id;
    out += '\t';
    out += to_string(e.exposure);
    out += '\t';
    out += e.input;
    out += '\t';
    out += e.target;
    out += '\n';
  }
  return out;
}

Corpus read_corpus(std::string_view text, Phase phase) {
  Corpus corpus;
  corpus.phase = phase;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text::strip_provenance(text))) {
    ++line_no;
    if (line.empty()) continue;
    auto f = text::split_exact(line, '\t');
    const std::string where = "corpus line " + std::to_string(line_no) + ": ";
    if (f.size() != 6) throw Error(ErrorKind::MalformedLine, kModule, where + "expected 6 fields");
    auto task = parse_task(f[1]);
    auto exposure = parse_exposure(f[3]);
    if (!task) throw Error(ErrorKind::UnknownTask, kModule, where + std::string(f[1]));
    if (!exposure) throw Error(ErrorKind::UnknownExposure, kModule, where + std::string(f[3]));
    corpus.examples.push_back(Example{std::string(f[0]), *task, std::string(f[2]), *exposure,
                                      std::string(f[4]), std::string(f[5]), 0});
  }
  return corpus;
}

}  // namespace forge
