#include <doctest.h>

#include <map>
#include <set>

#include "forge/error.hpp"
#include "forge/indexing.hpp"
#include "support.hpp"

using namespace forge;
using Tokens = std::vector<std::string>;

TEST_CASE("digit pair tokenization") {
  CHECK(tokenize_number("2048").tokens == Tokens{"20", "48"});
  CHECK(tokenize_number("7").tokens == Tokens{"7"});
  CHECK(tokenize_number("123").tokens == Tokens{"12", "3"});
  CHECK(tokenize_number("0").tokens == Tokens{"0"});
  CHECK_THROWS_AS(tokenize_number("12a"), Error);
  CHECK_THROWS_AS(tokenize_number(""), Error);
  CHECK_THROWS_AS(tokenize_number("012"), Error);
}

TEST_CASE("tokenization inverts by concatenation") {
  Rng rng(5);
  for (std::size_t len = 1; len <= 9; ++len) {
    for (int i = 0; i < 200; ++i) {
      std::string s(1, static_cast<char>('1' + rng.below(9)));
      while (s.size() < len) s += static_cast<char>('0' + rng.below(10));
      const auto seq = tokenize_number(s);
      CHECK(seq.joined() == s);
      CHECK(seq.tokens.size() == (len + 1) / 2);
    }
  }
}

TEST_CASE("random index is a permutation of the id range") {
  Rng rng(1);
  const auto split = testing::random_split(rng, 300, 1000, 8, 20);
  const auto items = split.item_universe();
  const auto map = random_index(split, 42);
  REQUIRE(map.size() == items.size());
  std::set<std::uint64_t> ids;
  for (const auto& e : map.entries()) ids.insert(std::stoull(e.tokens.joined()));
  CHECK(ids.size() == items.size());
  CHECK(*ids.begin() == 1001);
  CHECK(*ids.rbegin() == 1000 + items.size());
  CHECK(random_index(split, 42) == map);
  CHECK_FALSE(random_index(split, 43) == map);
}

TEST_CASE("random index on one item") {
  SplitLog s;
  s.users.push_back(testing::make_user("u", {"a"}, "a", "a"));
  const auto map = random_index(s, 99);
  CHECK(map.find("a")->joined() == "1001");
}

TEST_CASE("random index reaches every assignment") {
  SplitLog s;
  s.users.push_back(testing::make_user("u", {"a", "b", "c", "d", "e", "f", "g", "h"}, "i", "j"));
  std::map<std::string, std::set<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto map = random_index(s, seed);
    for (const auto& e : map.entries()) seen[e.raw_id].insert(e.tokens.joined());
  }
  CHECK(seen.size() == 10);
  for (const auto& [raw, ids] : seen) CHECK(ids.size() == 10);
}

TEST_CASE("sequential index scan order") {
  SplitLog s;
  s.users.push_back(testing::make_user("u1", {"i1", "i2", "i3"}, "i4", "i5"));
  s.users.push_back(testing::make_user("u2", {"i2", "i6"}, "i3", "i7"));
  const auto map = sequential_index(s);
  const std::map<std::string, std::string> want{{"i1", "1001"}, {"i2", "1002"}, {"i3", "1003"}, {"i6", "1004"},
                                                {"i4", "1005"}, {"i5", "1006"}, {"i7", "1007"}};
  CHECK(map.size() == want.size());
  for (const auto& [raw, id] : want) CHECK(map.find(raw)->joined() == id);
}

TEST_CASE("sequential index ignores val/test targets for train items") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto split = testing::random_split(rng, 20, 60);
    const auto before = sequential_index(split);
    int fresh = 0;
    for (auto& u : split.users) {
      u.val_target = "new" + std::to_string(fresh++);
      u.test_target = "new" + std::to_string(fresh++);
    }
    const auto after = sequential_index(split);
    for (const auto& u : split.users)
      for (const auto& item : u.train_history) CHECK(*before.find(item) == *after.find(item));
  }
}

TEST_CASE("user reindexing follows file order") {
  const auto log = parse_interactions("c x y z\na x y z\nb x y z\n", "t");
  const auto users = reindex_users(log);
  CHECK(users.find("c") == 1u);
  CHECK(users.find("a") == 2u);
  CHECK(users.find("b") == 3u);
  CHECK_FALSE(users.find("zz").has_value());
  const auto back = read_user_map(write_user_map(users));
  CHECK(back.raw_ids == users.raw_ids);
}

TEST_CASE("index map serialization") {
  IndexMap map(IndexMethod::Random, 1001);
  map.add("i1", TokenSeq{{"20", "48"}});
  CHECK(write_index_map(map).find("i1 2048\n") != std::string::npos);

  IndexMap collab(IndexMethod::Collaborative, 0);
  collab.add("a", TokenSeq{{"<CI1>", "<I2>"}});
  collab.add("b", TokenSeq{{"<CI1>", "<I1>"}});
  const auto text = write_index_map(collab);
  CHECK(text.find("a <CI1><I2>\n") != std::string::npos);
  const auto back = read_index_map(text);
  CHECK(back == collab);

  Rng rng(8);
  const auto split = testing::random_split(rng, 40, 100);
  const auto seq = sequential_index(split, 7);
  CHECK(read_index_map(write_index_map(seq)).entries() == seq.entries());
}

TEST_CASE("index map rejects duplicates") {
  IndexMap map(IndexMethod::Random, 1001);
  map.add("a", TokenSeq{{"10", "01"}});
  CHECK_THROWS_AS(map.add("a", TokenSeq{{"10", "02"}}), Error);
  CHECK_THROWS_AS(map.add("b", TokenSeq{{"10", "01"}}), Error);
  CHECK_THROWS_AS(map.add("c", TokenSeq{{"1x"}}), Error);
  CHECK(map.raw_for("1001") != nullptr);
  CHECK(*map.raw_for("1001") == "a");
}
