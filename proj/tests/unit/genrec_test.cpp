#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "forge/collab.hpp"
#include "forge/error.hpp"
#include "forge/genrec.hpp"
#include "support.hpp"

using namespace forge;
using testing::make_user;

namespace {

// Exhaustive reference: score every eligible item, sort by score descending
// with ties broken by ascending ID.
std::vector<std::string> argsort_oracle(const BaselineModel& model, const Query& q, std::size_t k) {
  const auto s = model.scores(q.history.empty() ? "" : q.history.back());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < model.items.size(); ++i) {
    if (std::find(q.history.begin(), q.history.end(), model.items[i]) != q.history.end()) continue;
    if (q.candidates && std::find(q.candidates->begin(), q.candidates->end(), model.items[i]) == q.candidates->end())
      continue;
    order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] > s[b];
    return item_id_less(model.items[a], model.items[b]);
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < order.size() && i < k; ++i) out.push_back(model.items[order[i]]);
  return out;
}

}  // namespace

TEST_CASE("trie construction") {
  IndexMap map(IndexMethod::Sequential, 1001);
  map.add("i1", TokenSeq{{"10", "01"}});
  map.add("i2", TokenSeq{{"10", "02"}});
  const auto trie = ItemTrie::build(map);
  CHECK(trie.nodes().size() == 4);
  CHECK(trie.nodes()[0].children.size() == 1);
  CHECK(trie.nodes()[0].children[0].first == "10");
  const auto mid = trie.walk(TokenSeq{{"10"}});
  REQUIRE(mid.has_value());
  CHECK(trie.nodes()[*mid].children.size() == 2);
  CHECK(*trie.item_for(TokenSeq{{"10", "02"}}) == "i2");
  CHECK(trie.item_for(TokenSeq{{"10"}}) == nullptr);
  CHECK_FALSE(trie.walk(TokenSeq{{"99"}}).has_value());
  std::size_t terminals = 0;
  for (const auto& n : trie.nodes()) terminals += n.item != ItemTrie::kNoItem;
  CHECK(terminals == 2);
  for (std::uint32_t v = 0; v < trie.nodes().size(); ++v)
    if (trie.nodes()[v].item != ItemTrie::kNoItem) CHECK(*trie.item_for(trie.path(v)) == trie.items()[trie.nodes()[v].item]);
}

TEST_CASE("trie errors") {
  CHECK_THROWS_AS(ItemTrie::build(IndexMap{}), Error);
  IndexMap map(IndexMethod::Collaborative, 0);
  map.add("a", TokenSeq{{"<CI1>"}});
  map.add("b", TokenSeq{{"<CI1>", "<I1>"}});
  try {
    ItemTrie::build(map);
    FAIL("expected PrefixCollision");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PrefixCollision);
  }
}

TEST_CASE("baseline counts") {
  SplitLog s;
  s.users.push_back(make_user("u1", {"a", "b"}, "x", "y"));
  s.users.push_back(make_user("u2", {"a", "c"}, "x", "y"));
  const auto index = sequential_index(s);
  const auto m = fit_baseline(s, index, 1.0);
  CHECK(m.popularity[m.item_index.at("a")] == 2.0);
  CHECK(m.popularity[m.item_index.at("b")] == 1.0);
  CHECK(m.total_popularity == 4.0);
  const auto& row = m.transitions[m.item_index.at("a")];
  REQUIRE(row.size() == 2);
  CHECK(row[0].second == 1.0);
  CHECK(m.transitions[m.item_index.at("b")].empty());
}

TEST_CASE("decoding by popularity and by transition") {
  SplitLog s;
  s.users.push_back(make_user("u1", {"1", "1", "1", "2", "1", "1", "2", "2"}, "3", "3"));
  auto index = sequential_index(s);
  auto m = fit_baseline(s, index, 0.0);
  const auto trie = ItemTrie::build(index);
  // popularity i1:5, i2:3; "9" has no outgoing transitions
  CHECK(beam_decode(m, trie, {"q", {"9"}, std::nullopt}, {2, 2}).items == std::vector<std::string>{"1", "2"});

  SplitLog t;
  t.users.push_back(make_user("u1", {"0", "2", "0", "2", "0", "2", "0", "2", "0", "3"}, "x", "y"));
  index = sequential_index(t);
  m = fit_baseline(t, index, 0.0);
  const auto trie2 = ItemTrie::build(index);
  // trans 0->2 = 4, 0->3 = 1
  CHECK(beam_decode(m, trie2, {"q", {"0"}, std::nullopt}, {1, 5}).items == std::vector<std::string>{"2"});
}

TEST_CASE("history exclusion and candidates") {
  Rng rng(3);
  const auto split = testing::random_split(rng, 50, 40);
  const auto index = sequential_index(split);
  const auto m = fit_baseline(split, index, 0.5);
  const auto trie = ItemTrie::build(index);
  Query q{"q", split.users[0].train_history, std::nullopt};
  const auto out = beam_decode(m, trie, q, {10, 20});
  for (const auto& item : out.items)
    CHECK(std::find(q.history.begin(), q.history.end(), item) == q.history.end());
  q.candidates = std::vector<std::string>{split.users[1].val_target, split.users[2].test_target};
  for (const auto& item : beam_decode(m, trie, q, {10, 20}).items)
    CHECK(std::find(q.candidates->begin(), q.candidates->end(), item) != q.candidates->end());
  CHECK_THROWS_AS(beam_decode(m, trie, q, {0, 20}), Error);
  CHECK_THROWS_AS(beam_decode(m, trie, q, {10, 5}), Error);
}

TEST_CASE("wide beam equals exhaustive argsort") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto split = testing::random_split(rng, 5 + rng.below(60), 5 + rng.below(195), 3, 10);
    const auto items = split.item_universe();
    IndexMap index;
    switch (trial % 3) {
      case 0: index = random_index(split, rng.next()); break;
      case 1: index = sequential_index(split); break;
      default: index = collaborative_index(split, {2 + rng.below(4), 3 + rng.below(10), rng.next()}).map;
    }
    const auto m = fit_baseline(split, index, rng.unit() * 2.0);
    const auto trie = ItemTrie::build(index);
    const ConstrainedDecoder decoder(m, trie);
    for (int qi = 0; qi < 10; ++qi) {
      const auto& u = split.users[rng.below(split.users.size())];
      Query q{"q", u.train_history, std::nullopt};
      if (qi % 4 == 3) {
        std::vector<std::string> cands;
        for (int c = 0; c < 8; ++c) cands.push_back(items[rng.below(items.size())]);
        q.candidates = cands;
      }
      const std::size_t k = 1 + rng.below(12);
      CHECK(decoder.decode(q, {k, std::max(k, items.size())}).items == argsort_oracle(m, q, k));
    }
  }
}

TEST_CASE("unused vocabulary tokens are never produced") {
  IndexMap map(IndexMethod::Sequential, 1001);
  for (int i = 1001; i <= 1098; ++i) map.add("i" + std::to_string(i), tokenize_number(std::to_string(i)));
  SplitLog s;
  s.users.push_back(make_user("u", {"i1001", "i1050", "i1098"}, "i1002", "i1003"));
  const auto m = fit_baseline(s, map, 1.0);
  const auto trie = ItemTrie::build(map);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    Query q{"q", {"i" + std::to_string(1001 + rng.below(98))}, std::nullopt};
    for (const auto& item : beam_decode(m, trie, q, {5, 5}).items) {
      const auto& tokens = map.find(item)->tokens;
      CHECK_FALSE(tokens.back() == "99");
    }
  }
}

TEST_CASE("id ordering") {
  CHECK(item_id_less("9", "10"));
  CHECK_FALSE(item_id_less("10", "9"));
  CHECK(item_id_less("a10", "a9"));
  CHECK(item_id_less("1001", "1002"));
}
