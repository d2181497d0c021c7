#include <algorithm>
#include <thread>
#include <unordered_map>

#include "forge/error.hpp"
#include "forge/genrec.hpp"
#include "forge/provenance.hpp"
#include "forge/text.hpp"
#include "steps.hpp"

namespace forge::cli {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string header_value(std::string_view text, std::string_view key) {
  if (!text.starts_with("# forge")) return {};
  const std::string_view first = text.substr(0, text.find('\n'));
  for (std::string_view field : text::split_spaces(first))
    if (field.size() > key.size() && field.starts_with(key) && field[key.size()] == '=')
      return std::string(field.substr(key.size() + 1));
  return {};
}

void write_split_dir(const fs::path& dir, const InteractionLog& log, const SplitLog& split,
                     const std::string& header) {
  InteractionLog train{split.dataset_name, {}};
  std::vector<Truth> val, test;
  for (const auto& u : split.users) {
    train.users.push_back({u.raw_user_id, u.train_history});
    val.push_back({u.raw_user_id, u.val_target});
    test.push_back({u.raw_user_id, u.test_target});
  }
  text::write_file(dir / "train.txt", header + format_interactions(train));
  text::write_file(dir / "val.txt", header + write_truth(val));
  text::write_file(dir / "test.txt", header + write_truth(test));
  text::write_file(dir / "users.txt", header + write_user_map(reindex_users(split)));
  Stats stats = dataset_stats(log);
  text::write_file(dir / "meta.txt", header + "dataset=" + split.dataset_name + "\n" +
                                         "split_users=" + std::to_string(split.users.size()) +
                                         "\n" + format_stats(stats));
}

SplitDir read_split_dir(const fs::path& dir) {
  SplitDir sd;
  const std::string meta = text::read_file(dir / "meta.txt");
  std::string dataset;
  std::size_t dropped = 0;
  for (std::string_view line : text::lines(text::strip_provenance(meta))) {
    if (line.starts_with("dataset=")) dataset = std::string(line.substr(8));
    if (line.starts_with("dropped_users=")) dropped = std::stoull(std::string(line.substr(14)));
  }
  if (dataset.empty())
    throw Error(ErrorKind::MalformedLine, "ingest", (dir / "meta.txt").string() + " lacks dataset=");

  sd.train_text = text::read_file(dir / "train.txt");
  sd.val_text = text::read_file(dir / "val.txt");
  sd.test_text = text::read_file(dir / "test.txt");
  const InteractionLog train = parse_interactions(text::strip_provenance(sd.train_text), dataset);
  std::unordered_map<std::string, std::string> val, test;
  for (auto& t : parse_truth(sd.val_text)) val.emplace(t.query_id, t.item);
  for (auto& t : parse_truth(sd.test_text)) test.emplace(t.query_id, t.item);

  sd.split.dataset_name = dataset;
  sd.split.dropped_user_count = dropped;
  for (const auto& u : train.users) {
    auto v = val.find(u.raw_user_id);
    auto t = test.find(u.raw_user_id);
    if (v == val.end() || t == test.end())
      throw Error(ErrorKind::MalformedLine, "ingest",
                  "user " + u.raw_user_id + " lacks a val or test target");
    sd.split.users.push_back({u.raw_user_id, u.history, v->second, t->second});
  }
  sd.users = read_user_map(text::read_file(dir / "users.txt"));
  return sd;
}

namespace steps {

std::string ingest(const fs::path& input, const std::string& dataset, const fs::path& out) {
  const std::string raw = text::read_file(input);
  const InteractionLog log = parse_interactions(raw, dataset);
  const SplitLog split = split_leave_one_out(log);
  const std::string header = Provenance("ingest")
                                 .param("dataset", dataset)
                                 .input(input.filename().string(), raw)
                                 .line();
  write_split_dir(out, log, split, header);
  return format_stats(dataset_stats(log));
}

std::string stats(const fs::path& input, const std::string& dataset) {
  return format_stats(dataset_stats(parse_interactions(text::read_file(input), dataset)));
}

IndexMap index(const IndexArgs& args) {
  const SplitDir sd = read_split_dir(args.split_dir);
  Provenance prov("index");
  prov.param("method", std::string(to_string(args.method)));
  IndexMap map;
  std::string tree_dump;
  switch (args.method) {
    case IndexMethod::Random:
      prov.param("seed", std::to_string(args.seed)).param("start_id", std::to_string(args.start_id));
      map = random_index(sd.split, args.seed, args.start_id);
      break;
    case IndexMethod::Sequential:
      prov.param("start_id", std::to_string(args.start_id));
      map = sequential_index(sd.split, args.start_id);
      break;
    case IndexMethod::Collaborative: {
      prov.param("seed", std::to_string(args.collab.seed))
          .param("clusters", std::to_string(args.collab.clusters))
          .param("max_leaf", std::to_string(args.collab.max_leaf));
      auto result = collaborative_index(sd.split, args.collab);
      map = std::move(result.map);
      tree_dump = result.tree.dump();
      break;
    }
  }
  prov.input("train.txt", sd.train_text).input("val.txt", sd.val_text).input("test.txt", sd.test_text);
  const std::string header = prov.line();
  text::write_file(args.out, header + write_index_map(map));
  if (args.dump_tree) {
    if (args.method != IndexMethod::Collaborative)
      throw Error(ErrorKind::InvalidConfig, "indexing", "--dump-tree needs --method collaborative");
    text::write_file(*args.dump_tree, header + tree_dump);
  }
  return map;
}

Corpus prompts(const PromptArgs& args) {
  const SplitDir sd = read_split_dir(args.split_dir);
  const std::string index_text = text::read_file(args.index);
  const std::string template_text = text::read_file(args.templates);
  const IndexMap map = read_index_map(index_text);
  const auto templates = parse_templates(template_text);
  CorpusOptions opts;
  opts.task = args.task;
  opts.phase = args.phase;
  opts.history_cap = args.history_cap;
  Corpus corpus = build_corpus(sd.split, map, sd.users, templates, opts);
  const std::string header =
      Provenance("prompts")
          .param("phase", std::string(to_string(args.phase)))
          .param("task", args.task ? std::string(to_string(*args.task)) : "both")
          .param("history_cap", std::to_string(args.history_cap))
          .param("skipped", std::to_string(corpus.skipped))
          .input("train.txt", sd.train_text)
          .input(args.index.filename().string(), index_text)
          .input(args.templates.filename().string(), template_text)
          .line();
  text::write_file(args.out, header + write_corpus(corpus));
  return corpus;
}

BatchPlan schedule(const std::vector<fs::path>& corpora, std::size_t batch_size,
                   std::uint64_t seed, const fs::path& out) {
  std::vector<Corpus> parts;
  Provenance prov("schedule");
  prov.param("batch_size", std::to_string(batch_size)).param("seed", std::to_string(seed));
  for (const auto& path : corpora) {
    const std::string text = text::read_file(path);
    const auto phase = parse_phase(header_value(text, "phase"));
    parts.push_back(read_corpus(text, phase.value_or(Phase::Train)));
    prov.input(path.filename().string(), text);
  }
  const Corpus merged = merge_sp5(parts);
  BatchPlan plan = plan_batches(merged, batch_size, seed);
  text::write_file(out, prov.line() + write_plan(plan));
  return plan;
}

std::vector<RankedList> generate(const GenerateArgs& args) {
  if (args.phase == Phase::Train)
    throw Error(ErrorKind::InvalidConfig, "genrec", "generate runs on the val or test phase");
  const SplitDir sd = read_split_dir(args.split_dir);
  const std::string index_text = text::read_file(args.index);
  const IndexMap map = read_index_map(index_text);
  const ItemTrie trie = ItemTrie::build(map);
  const BaselineModel model = fit_baseline(sd.split, map, args.alpha);
  const ConstrainedDecoder decoder(model, trie);

  std::unordered_map<std::string, std::vector<std::string>> candidates;
  std::string candidate_text;
  if (args.candidates) {
    candidate_text = text::read_file(*args.candidates);
    for (const auto& list : parse_predictions(candidate_text).lists)
      candidates.emplace(list.query_id, list.items);
  }

  std::vector<Query> queries;
  for (const auto& u : sd.split.users) {
    Query q{u.raw_user_id, u.train_history, std::nullopt};
    if (args.phase == Phase::Test) q.history.push_back(u.val_target);
    if (args.candidates) {
      auto it = candidates.find(u.raw_user_id);
      q.candidates = it == candidates.end() ? std::vector<std::string>{} : it->second;
    }
    queries.push_back(std::move(q));
  }

  const DecodeOptions opts{args.k, args.beam};
  std::vector<RankedList> results(queries.size());
  const std::size_t threads = std::clamp<std::size_t>(args.threads, 1, 64);
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < queries.size(); i += threads)
            results[i] = decoder.decode(queries[i], opts);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Provenance prov("generate");
  prov.param("model", "baseline")
      .param("phase", std::string(to_string(args.phase)))
      .param("k", std::to_string(args.k))
      .param("beam", std::to_string(args.beam))
      .param("alpha", fmt_double(args.alpha))
      .input("train.txt", sd.train_text)
      .input("val.txt", sd.val_text)
      .input(args.index.filename().string(), index_text);
  if (args.candidates) prov.input(args.candidates->filename().string(), candidate_text);
  text::write_file(args.out, prov.line() + write_predictions(results));
  return results;
}

Metrics eval(const EvalArgs& args, std::string* report) {
  const std::string pred_text = text::read_file(args.predictions);
  const std::string truth_text = text::read_file(args.truth);
  PredictionSet preds = parse_predictions(pred_text);
  std::vector<Truth> truths = parse_truth(truth_text);
  std::size_t unknown = 0;
  std::string index_text;
  if (args.index) {
    index_text = text::read_file(*args.index);
    const IndexMap map = read_index_map(index_text);
    preds = decode_predictions(preds, map, &unknown);
    for (auto& t : truths)
      if (const std::string* raw = map.raw_for(t.item)) t.item = *raw;
  }
  Metrics metrics = evaluate(preds, truths, args.ks);
  std::string text = format_metrics(metrics);
  if (args.index) text += "unknown_ids=" + std::to_string(unknown) + "\n";
  if (report) *report = text;
  if (args.out) {
    Provenance prov("eval");
    prov.input(args.predictions.filename().string(), pred_text)
        .input(args.truth.filename().string(), truth_text);
    if (args.index) prov.input(args.index->filename().string(), index_text);
    text::write_file(*args.out, prov.line() + text);
  }
  return metrics;
}

}  // namespace steps

PipelineReport run_pipeline(const RunConfig& config) {
  PipelineReport report;
  const fs::path split_dir = config.out / "split";
  steps::ingest(config.input, config.dataset, split_dir);
  for (const char* name : {"train.txt", "val.txt", "test.txt", "users.txt", "meta.txt"})
    report.artifacts.push_back(split_dir / name);

  for (IndexMethod method : config.methods) {
    const fs::path dir = config.out / std::string(to_string(method));
    steps::IndexArgs ia;
    ia.split_dir = split_dir;
    ia.method = method;
    ia.seed = config.seed;
    ia.start_id = config.start_id;
    ia.collab = config.collab;
    ia.out = dir / "index.txt";
    if (method == IndexMethod::Collaborative) ia.dump_tree = dir / "cluster_tree.txt";
    steps::index(ia);
    report.artifacts.push_back(ia.out);
    if (ia.dump_tree) report.artifacts.push_back(*ia.dump_tree);

    std::vector<fs::path> train_corpora;
    for (Phase phase : {Phase::Train, Phase::Val, Phase::Test}) {
      steps::PromptArgs pa;
      pa.split_dir = split_dir;
      pa.index = ia.out;
      pa.templates = config.templates;
      pa.phase = phase;
      pa.history_cap = config.history_cap;
      pa.out = dir / ("corpus_" + std::string(to_string(phase)) + ".tsv");
      steps::prompts(pa);
      report.artifacts.push_back(pa.out);
      if (phase == Phase::Train) train_corpora.push_back(pa.out);
    }

    const fs::path plan = dir / "plan.tsv";
    steps::schedule(train_corpora, config.batch_size, config.seed, plan);
    report.artifacts.push_back(plan);

    steps::GenerateArgs ga;
    ga.split_dir = split_dir;
    ga.index = ia.out;
    ga.k = config.k;
    ga.beam = config.beam;
    ga.alpha = config.alpha;
    ga.threads = config.threads;
    ga.out = dir / "predictions.tsv";
    steps::generate(ga);
    report.artifacts.push_back(ga.out);

    steps::EvalArgs ea;
    ea.predictions = ga.out;
    ea.truth = split_dir / "test.txt";
    ea.ks = config.ks;
    ea.out = dir / "metrics.txt";
    report.metrics.emplace(method, steps::eval(ea, nullptr));
    report.artifacts.push_back(*ea.out);
  }
  return report;
}

}  // namespace forge::cli
