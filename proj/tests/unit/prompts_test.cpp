#include <doctest.h>

#include <set>

#include "forge/error.hpp"
#include "forge/prompts.hpp"
#include "forge/text.hpp"
#include "support.hpp"

using namespace forge;
using testing::make_user;

namespace {

std::vector<PromptTemplate> shipped() { return parse_templates(text::read_file(FORGE_TEST_TEMPLATES)); }

ErrorKind kind_of(std::string_view text) {
  try {
    parse_templates(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

TokenSeq ids(std::string s) { return tokenize_number(s); }

struct Fixture {
  SplitLog split;
  IndexMap index;
  UserMap users;
};

Fixture three_users() {
  Fixture f;
  f.split.dataset_name = "Beauty";
  f.split.users.push_back(make_user("a", {"1", "2", "3"}, "4", "5"));
  f.split.users.push_back(make_user("b", {"2", "6"}, "3", "7"));
  f.split.users.push_back(make_user("c", {"8", "1", "2", "9"}, "6", "1"));
  f.index = sequential_index(f.split);
  f.users = reindex_users(f.split);
  return f;
}

}  // namespace

TEST_CASE("shipped templates") {
  const auto ts = shipped();
  REQUIRE(ts.size() == 22);
  std::size_t seq = 0, straight = 0, seq_unseen = 0, straight_unseen = 0;
  for (const auto& t : ts) {
    (t.task == Task::Sequential ? seq : straight)++;
    if (t.exposure == Exposure::Unseen) (t.task == Task::Sequential ? seq_unseen : straight_unseen)++;
    CHECK(t.target_template == "{dataset} {target}");
  }
  CHECK(seq == 11);
  CHECK(straight == 11);
  CHECK(seq_unseen == 1);
  CHECK(straight_unseen == 1);
  CHECK(ts.front().template_id == "A1");
  CHECK(ts.back().template_id == "B11");
}

TEST_CASE("template line parsing") {
  const auto ts = parse_templates("straightforward;seen;What should we recommend for {dataset} user_{user_id} ?;{dataset} {target}\n");
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].template_id == "B1");
  CHECK(ts[0].task == Task::Straightforward);
  CHECK(kind_of("sequential;seen;{dataset} {history}\n") == ErrorKind::BadFieldCount);
  CHECK(kind_of("sequential;seen;{dataset} {history} {foo};{dataset} {target}\n") == ErrorKind::UnknownPlaceholder);
  CHECK(kind_of("ranking;seen;{dataset} {history};{dataset} {target}\n") == ErrorKind::UnknownTask);
  CHECK(kind_of("sequential;often;{dataset} {history};{dataset} {target}\n") == ErrorKind::UnknownExposure);
  CHECK(kind_of("sequential;seen;{dataset} user_{user_id};{dataset} {target}\n") == ErrorKind::InvalidTemplate);
  CHECK(kind_of("straightforward;seen;{dataset} {history};{dataset} {target}\n") == ErrorKind::InvalidTemplate);
  CHECK(kind_of("sequential;seen;{dataset} {history} {target};{dataset} {target}\n") == ErrorKind::InvalidTemplate);
}

TEST_CASE("rendering") {
  const auto ts = shipped();
  Bindings b{"Beauty", 14, std::vector<TokenSeq>{ids("1001"), ids("1002")}, ids("1003")};
  const auto a1 = render(ts[0], b);
  CHECK(a1.input ==
        "Considering Beauty user_14 has interacted with Beauty items 1001 1002 . What is the next "
        "recommendation for the user ?");
  CHECK(a1.target == "Beauty 1003");
  const auto b1 = render(ts[11], b);
  CHECK(b1.input == "What should we recommend for Beauty user_14 ?");
  CHECK(b1.target == "Beauty 1003");

  Bindings missing{"Beauty", 14, std::nullopt, ids("1003")};
  try {
    render(ts[0], missing);
    FAIL("expected UnboundPlaceholder");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnboundPlaceholder);
  }
}

TEST_CASE("train corpus") {
  const auto f = three_users();
  const auto ts = shipped();
  const auto corpus = build_corpus(f.split, f.index, f.users, ts, {Task::Sequential, Phase::Train, 20});
  // user c's last train item (9) is fine; user b's history before target is [2]
  CHECK(corpus.examples.size() == 30);
  CHECK(corpus.skipped == 0);
  std::set<std::string> templates;
  for (const auto& e : corpus.examples) {
    CHECK(e.exposure == Exposure::Seen);
    templates.insert(e.template_id);
  }
  CHECK(templates.size() == 10);
  CHECK(corpus.examples[0].user_index == 1);
  CHECK(corpus.examples[0].target == "Beauty 1003");
  CHECK(corpus.examples[10].user_index == 2);
}

TEST_CASE("train examples never target held-out items") {
  Rng rng(12);
  const auto ts = shipped();
  for (int trial = 0; trial < 30; ++trial) {
    const auto split = testing::random_split(rng, 30, 15, 3, 8);
    const auto index = sequential_index(split);
    const auto users = reindex_users(split);
    const auto corpus = build_corpus(split, index, users, ts, {std::nullopt, Phase::Train, 20});
    for (const auto& e : corpus.examples) {
      const auto& u = split.users[e.user_index - 1];
      CHECK(e.target != "Toy " + index.find(u.val_target)->joined());
      CHECK(e.target != "Toy " + index.find(u.test_target)->joined());
    }
  }
}

TEST_CASE("sequential train example needs a history") {
  Fixture f;
  f.split.dataset_name = "X";
  f.split.users.push_back(make_user("a", {"1"}, "2", "3"));
  f.index = sequential_index(f.split);
  f.users = reindex_users(f.split);
  const auto ts = shipped();
  const auto seq = build_corpus(f.split, f.index, f.users, ts, {Task::Sequential, Phase::Train, 20});
  CHECK(seq.examples.empty());
  CHECK(seq.skipped == 10);
  const auto straight = build_corpus(f.split, f.index, f.users, ts, {Task::Straightforward, Phase::Train, 20});
  CHECK(straight.examples.size() == 10);
}

TEST_CASE("val and test corpora carry both exposures") {
  const auto f = three_users();
  const auto ts = shipped();
  const auto val = build_corpus(f.split, f.index, f.users, ts, {std::nullopt, Phase::Val, 20});
  CHECK(val.examples.size() == 3 * 22);
  std::size_t unseen = 0;
  for (const auto& e : val.examples) unseen += e.exposure == Exposure::Unseen;
  CHECK(unseen == 6);
  const auto test = build_corpus(f.split, f.index, f.users, ts, {Task::Sequential, Phase::Test, 20});
  // user a: history 1 2 3 4, target 5
  CHECK(test.examples[0].input.find("1001 1002 1003 " + f.index.find("4")->joined() + " .") != std::string::npos);
  CHECK(test.examples[0].target == "Beauty " + f.index.find("5")->joined());
}

TEST_CASE("history cap keeps the most recent items") {
  const auto f = three_users();
  const auto ts = shipped();
  const auto test = build_corpus(f.split, f.index, f.users, ts, {Task::Sequential, Phase::Test, 2});
  CHECK(test.examples[0].input.find("items 1003 " + f.index.find("4")->joined() + " .") != std::string::npos);
}

TEST_CASE("SP5 merge keeps datasets apart") {
  auto f = three_users();
  auto g = three_users();
  g.split.dataset_name = "Sports";
  const auto ts = shipped();
  const Corpus parts[] = {build_corpus(f.split, f.index, f.users, ts, {std::nullopt, Phase::Train, 20}),
                          build_corpus(g.split, g.index, g.users, ts, {std::nullopt, Phase::Train, 20})};
  const auto merged = merge_sp5(parts);
  CHECK(merged.examples.size() == parts[0].examples.size() + parts[1].examples.size());
  for (const auto& e : merged.examples) {
    const std::string other = e.dataset == "Beauty" ? "Sports" : "Beauty";
    CHECK(e.input.find(e.dataset) != std::string::npos);
    CHECK(e.target.starts_with(e.dataset + " "));
    CHECK(e.input.find(other) == std::string::npos);
    CHECK(e.target.find(other) == std::string::npos);
  }
  CHECK(merge_sp5({}).examples.empty());
  Corpus val;
  val.phase = Phase::Val;
  const Corpus mixed[] = {parts[0], val};
  CHECK_THROWS_AS(merge_sp5(mixed), Error);
}

TEST_CASE("corpus round trip") {
  const auto f = three_users();
  const auto ts = shipped();
  const auto corpus = build_corpus(f.split, f.index, f.users, ts, {std::nullopt, Phase::Test, 20});
  const auto text = write_corpus(corpus);
  const auto back = read_corpus(text, Phase::Test);
  REQUIRE(back.examples.size() == corpus.examples.size());
  for (std::size_t i = 0; i < back.examples.size(); ++i) {
    CHECK(back.examples[i].input == corpus.examples[i].input);
    CHECK(back.examples[i].target == corpus.examples[i].target);
    CHECK(back.examples[i].template_id == corpus.examples[i].template_id);
  }
  CHECK(write_corpus(build_corpus(f.split, f.index, f.users, ts, {std::nullopt, Phase::Test, 20})) == text);
}

TEST_CASE("target rendering is injective") {
  const auto ts = shipped();
  std::set<std::string> targets;
  for (int i = 1001; i < 1300; ++i) {
    Bindings b{"Beauty", 1, std::vector<TokenSeq>{}, ids(std::to_string(i))};
    targets.insert(render(ts[11], b).target);
  }
  CHECK(targets.size() == 299);
}
