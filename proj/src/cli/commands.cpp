#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "forge/error.hpp"
#include "forge/provenance.hpp"
#include "forge/synth.hpp"
#include "forge/text.hpp"
#include "steps.hpp"

namespace forge::cli {

namespace {

const std::map<std::string, IndexMethod> kMethods{{"random", IndexMethod::Random},
                                                  {"sequential", IndexMethod::Sequential},
                                                  {"collaborative", IndexMethod::Collaborative}};
const std::map<std::string, Phase> kPhases{{"train", Phase::Train}, {"val", Phase::Val},
                                           {"test", Phase::Test}};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// Replaces `--config FILE` with the flags it lists. Keys already given on the
// command line are skipped so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return a == "--config" || a.starts_with("--config=");
  });
  if (it == args.end()) return args;
  std::string file;
  if (*it == "--config") {
    if (std::next(it) == args.end()) return args;  // let the parser report it
    file = *std::next(it);
    it = args.erase(it, it + 2);
  } else {
    file = it->substr(9);
    it = args.erase(it);
  }
  if (!fs::is_regular_file(file)) throw CLI::ValidationError("--config", "file does not exist: " + file);

  auto given = [&](const std::string& key) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == "--" + key || a.starts_with("--" + key + "=");
    });
  };
  std::vector<std::string> extra;
  const std::string contents = text::read_file(file);
  for (std::string_view line : text::lines(contents)) {
    const std::string l = trim(line);
    if (l.empty() || l[0] == '#' || l[0] == ';' || l[0] == '[') continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--config", "expected key=value: " + l);
    std::string key = trim(l.substr(0, eq));
    std::string value = trim(l.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (given(key)) continue;
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  args.insert(it, extra.begin(), extra.end());
  return args;
}

std::optional<Task> task_filter(const std::string& s) {
  if (s == "both") return std::nullopt;
  return parse_task(s);
}

}  // namespace

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }
  std::vector<const char*> expanded;
  for (const auto& a : args) expanded.push_back(a.c_str());

  CLI::App app{"forge: data pipeline for generative recommendation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto configurable = [](CLI::App* sub) {
    sub->add_option("--config", "key=value file; flags on the command line override it");
    return sub;
  };

  // ingest
  fs::path ingest_input, ingest_out;
  std::string ingest_dataset;
  auto* ingest = configurable(app.add_subcommand("ingest", "parse and split an interaction file"));
  ingest->add_option("--input", ingest_input, "line-per-user interaction file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--dataset", ingest_dataset, "dataset name used in prompts")->required();
  ingest->add_option("--out", ingest_out, "split directory to write")->required();

  // stats
  fs::path stats_input;
  std::string stats_dataset = "dataset";
  auto* stats = configurable(app.add_subcommand("stats", "print dataset statistics"));
  stats->add_option("--input", stats_input)->required()->check(CLI::ExistingFile);
  stats->add_option("--dataset", stats_dataset);

  // index
  steps::IndexArgs ia;
  std::optional<std::string> dump_tree;
  auto* index = configurable(app.add_subcommand("index", "assign item IDs"));
  std::string method_name;
  index->add_option("--method", method_name, "random|sequential|collaborative")
      ->required()
      ->check(CLI::IsMember({"random", "sequential", "collaborative"}));
  index->add_option("--seed", ia.seed, "seed for random and collaborative indexing")->default_val(42);
  index->add_option("--start-id", ia.start_id)->default_val(kDefaultStartId);
  index->add_option("--clusters", ia.collab.clusters, "clusters per split (N)")->default_val(20)->check(CLI::Range(2, 1 << 20));
  index->add_option("--max-leaf", ia.collab.max_leaf, "largest set kept as a leaf is max-leaf - 1 (k)")->default_val(100)->check(CLI::Range(2, 1 << 30));
  index->add_option("--split-dir", ia.split_dir)->required()->check(CLI::ExistingDirectory);
  index->add_option("--out", ia.out)->required();
  index->add_option("--dump-tree", dump_tree, "write the cluster tree (collaborative only)");

  // prompts
  steps::PromptArgs pa;
  pa.templates = FORGE_DEFAULT_TEMPLATES;
  std::string prompt_task = "both";
  auto* prompts = configurable(app.add_subcommand("prompts", "render a prompt corpus"));
  prompts->add_option("--templates", pa.templates)->check(CLI::ExistingFile);
  prompts->add_option("--task", prompt_task)->check(CLI::IsMember({"sequential", "straightforward", "both"}));
  std::string prompt_phase = "train";
  prompts->add_option("--phase", prompt_phase)->check(CLI::IsMember({"train", "val", "test"}));
  prompts->add_option("--history-cap", pa.history_cap)->default_val(20)->check(CLI::PositiveNumber);
  prompts->add_option("--split-dir", pa.split_dir)->required()->check(CLI::ExistingDirectory);
  prompts->add_option("--index", pa.index)->required()->check(CLI::ExistingFile);
  prompts->add_option("--out", pa.out)->required();

  // schedule
  std::vector<fs::path> sched_corpora;
  std::size_t batch_size = 64;
  std::uint64_t sched_seed = 42;
  fs::path sched_out;
  auto* schedule = configurable(app.add_subcommand("schedule", "plan task-homogeneous batches"));
  schedule->add_option("--corpus", sched_corpora)->required()->check(CLI::ExistingFile);
  schedule->add_option("--batch-size", batch_size)->default_val(64)->check(CLI::PositiveNumber);
  schedule->add_option("--seed", sched_seed)->default_val(42);
  schedule->add_option("--out", sched_out)->required();

  // generate
  steps::GenerateArgs ga;
  std::string model = "baseline";
  std::optional<std::string> candidates;
  auto* generate = configurable(app.add_subcommand("generate", "ID-constrained top-k generation"));
  generate->add_option("--model", model)->check(CLI::IsMember({"baseline"}))->default_val("baseline");
  generate->add_option("--split-dir", ga.split_dir)->required()->check(CLI::ExistingDirectory);
  generate->add_option("--index", ga.index)->required()->check(CLI::ExistingFile);
  generate->add_option("--k", ga.k)->default_val(10)->check(CLI::PositiveNumber);
  generate->add_option("--beam", ga.beam)->default_val(20)->check(CLI::PositiveNumber);
  generate->add_option("--alpha", ga.alpha, "popularity smoothing weight")->default_val(1.0)->check(CLI::NonNegativeNumber);
  std::string gen_phase = "test";
  generate->add_option("--phase", gen_phase)->check(CLI::IsMember({"val", "test"}));
  generate->add_option("--candidates", candidates, "per-query candidate lists (prediction format)");
  generate->add_option("--threads", ga.threads)->default_val(1)->check(CLI::Range(1, 64));
  generate->add_option("--out", ga.out)->required();

  // eval
  steps::EvalArgs ea;
  std::optional<std::string> eval_index, eval_out;
  auto* eval = configurable(app.add_subcommand("eval", "HR@k / NDCG@k of a prediction file"));
  eval->add_option("--predictions", ea.predictions)->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", ea.truth)->required()->check(CLI::ExistingFile);
  eval->add_option("--k", ea.ks, "comma-separated cutoffs")->delimiter(',')->default_str("5,10")->check(CLI::PositiveNumber);
  eval->add_option("--index", eval_index, "decode generated IDs through this index map");
  eval->add_option("--out", eval_out);

  // pipeline
  RunConfig rc;
  rc.templates = FORGE_DEFAULT_TEMPLATES;
  std::vector<std::string> method_names{"random", "sequential", "collaborative"};
  auto* pipeline = configurable(app.add_subcommand("pipeline", "run every step end to end"));
  pipeline->add_option("--input", rc.input)->required()->check(CLI::ExistingFile);
  pipeline->add_option("--dataset", rc.dataset)->required();
  pipeline->add_option("--out", rc.out)->required();
  pipeline->add_option("--templates", rc.templates)->check(CLI::ExistingFile);
  pipeline->add_option("--methods", method_names)->delimiter(',')->check(CLI::IsMember({"random", "sequential", "collaborative"}));
  pipeline->add_option("--seed", rc.seed)->default_val(42);
  pipeline->add_option("--start-id", rc.start_id)->default_val(kDefaultStartId);
  pipeline->add_option("--clusters", rc.collab.clusters)->default_val(20)->check(CLI::Range(2, 1 << 20));
  pipeline->add_option("--max-leaf", rc.collab.max_leaf)->default_val(100)->check(CLI::Range(2, 1 << 30));
  pipeline->add_option("--history-cap", rc.history_cap)->default_val(20)->check(CLI::PositiveNumber);
  pipeline->add_option("--batch-size", rc.batch_size)->default_val(64)->check(CLI::PositiveNumber);
  pipeline->add_option("--metric-k", rc.ks)->delimiter(',')->default_str("5,10")->check(CLI::PositiveNumber);
  pipeline->add_option("--k", rc.k)->default_val(10)->check(CLI::PositiveNumber);
  pipeline->add_option("--beam", rc.beam)->default_val(20)->check(CLI::PositiveNumber);
  pipeline->add_option("--alpha", rc.alpha)->default_val(1.0)->check(CLI::NonNegativeNumber);
  pipeline->add_option("--threads", rc.threads)->default_val(1)->check(CLI::Range(1, 64));

  // synth
  SynthConfig sc;
  fs::path synth_out;
  std::string synth_dataset = "Synthetic";
  auto* synth = configurable(app.add_subcommand("synth", "write a synthetic interaction file"));
  synth->add_option("--users", sc.users)->default_val(1000)->check(CLI::PositiveNumber);
  synth->add_option("--items", sc.items)->default_val(2000)->check(CLI::Range(4, 1 << 24));
  synth->add_option("--min-length", sc.min_length)->default_val(8)->check(CLI::PositiveNumber);
  synth->add_option("--max-length", sc.max_length)->default_val(30)->check(CLI::PositiveNumber);
  synth->add_option("--follow", sc.follow)->default_val(0.8)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", sc.seed)->default_val(7);
  synth->add_option("--out", synth_out)->required();

  try {
    app.parse(static_cast<int>(expanded.size()), expanded.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*ingest) {
      std::cout << steps::ingest(ingest_input, ingest_dataset, ingest_out);
    } else if (*stats) {
      std::cout << steps::stats(stats_input, stats_dataset);
    } else if (*index) {
      ia.method = kMethods.at(method_name);
      if (dump_tree) ia.dump_tree = *dump_tree;
      ia.collab.seed = ia.seed;
      const IndexMap map = steps::index(ia);
      std::cout << "indexed " << map.size() << " items (" << to_string(ia.method) << ")\n";
    } else if (*prompts) {
      pa.phase = kPhases.at(prompt_phase);
      pa.task = task_filter(prompt_task);
      const Corpus corpus = steps::prompts(pa);
      std::cout << corpus.examples.size() << " examples (" << corpus.skipped << " skipped)\n";
    } else if (*schedule) {
      const BatchPlan plan = steps::schedule(sched_corpora, batch_size, sched_seed, sched_out);
      std::cout << plan.batches.size() << " batches\n";
    } else if (*generate) {
      ga.phase = kPhases.at(gen_phase);
      if (candidates) ga.candidates = *candidates;
      const auto lists = steps::generate(ga);
      std::cout << lists.size() << " ranked lists\n";
    } else if (*eval) {
      if (eval_index) ea.index = *eval_index;
      if (eval_out) ea.out = *eval_out;
      std::string report;
      steps::eval(ea, &report);
      std::cout << report;
    } else if (*pipeline) {
      rc.methods.clear();
      for (const auto& name : method_names) rc.methods.push_back(kMethods.at(name));
      rc.collab.seed = rc.seed;
      const PipelineReport report = run_pipeline(rc);
      for (const auto& [method, metrics] : report.metrics)
        std::cout << "== " << to_string(method) << "\n" << format_metrics(metrics);
    } else if (*synth) {
      text::write_file(synth_out, format_interactions(synth_markov(sc)));
    }
  } catch (const Error& e) {
    std::cerr << "forge: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "forge: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace forge::cli
