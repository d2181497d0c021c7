#include <doctest.h>

#include <map>
#include <set>

#include "forge/collab.hpp"
#include "forge/error.hpp"
#include "support.hpp"

using namespace forge;
using testing::make_user;

namespace {

// Users whose histories alternate inside one clique, so every pair of a
// clique co-occurs and no pair across cliques does.
SplitLog clique_split(const std::vector<std::vector<std::string>>& cliques) {
  SplitLog s;
  s.dataset_name = "t";
  int u = 0;
  for (const auto& c : cliques)
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        s.users.push_back(make_user("u" + std::to_string(u++), {c[i], c[j], c[i]}, c[j], c[i]));
  return s;
}

std::set<std::set<std::string>> as_sets(const CooccurrenceGraph& g, const Partition& p) {
  std::set<std::set<std::string>> out;
  for (const auto& part : p) {
    std::set<std::string> s;
    for (auto i : part) s.insert(g.nodes[i]);
    out.insert(s);
  }
  return out;
}

}  // namespace

TEST_CASE("co-occurrence counts users, not repeats") {
  SplitLog s;
  s.users.push_back(make_user("u1", {"a", "b", "c", "a"}, "x", "y"));
  s.users.push_back(make_user("u2", {"b", "d"}, "x", "y"));
  const auto g = build_cooccurrence(s);
  std::map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < g.size(); ++i) at[g.nodes[i]] = i;
  CHECK(g.size() == 6);
  CHECK(g.weight(at["a"], at["b"]) == 1.0);
  CHECK(g.weight(at["a"], at["c"]) == 1.0);
  CHECK(g.weight(at["b"], at["c"]) == 1.0);
  CHECK(g.weight(at["b"], at["d"]) == 1.0);
  CHECK(g.weight(at["a"], at["d"]) == 0.0);
  CHECK(g.weight(at["a"], at["a"]) == 0.0);
  CHECK(g.weight(at["x"], at["y"]) == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g.weight(i, j) == g.weight(j, i));
}

TEST_CASE("single-item histories give an empty graph") {
  SplitLog s;
  s.users.push_back(make_user("u1", {"a"}, "b", "c"));
  const auto g = build_cooccurrence(s);
  for (double w : g.weights) CHECK(w == 0.0);
}

TEST_CASE("spectral clustering splits disconnected triangles") {
  const auto s = clique_split({{"a", "b", "c"}, {"d", "e", "f"}});
  const auto g = build_cooccurrence(s);
  const auto p = spectral_cluster(g, 2, 1);
  CHECK(as_sets(g, p) == std::set<std::set<std::string>>{{"a", "b", "c"}, {"d", "e", "f"}});
}

TEST_CASE("spectral clustering trivial cases") {
  const auto s = clique_split({{"a", "b"}});
  const auto g = build_cooccurrence(s);
  CHECK(spectral_cluster(g, 1, 0).size() == 1);
  CHECK(as_sets(g, spectral_cluster(g, 2, 0)) == std::set<std::set<std::string>>{{"a"}, {"b"}});
  CHECK_THROWS_AS(spectral_cluster(g, 3, 0), Error);
}

TEST_CASE("isolated items form their own part") {
  SplitLog s = clique_split({{"a", "b", "c"}, {"d", "e", "f"}});
  s.users.push_back(make_user("solo", {"z"}, "a", "b"));
  const auto g = build_cooccurrence(s);
  const auto sets = as_sets(g, spectral_cluster(g, 3, 5));
  CHECK(sets.count({"z"}) == 1);
  CHECK(sets.count({"a", "b", "c"}) == 1);
}

TEST_CASE("k-means separates obvious clusters") {
  const std::vector<double> pts{0, 0, 0.1, 0, 0, 0.1, 5, 5, 5.1, 5, 5, 5.1};
  const auto labels = kmeans(pts, 2, 2, 3);
  CHECK(labels[0] == labels[1]);
  CHECK(labels[1] == labels[2]);
  CHECK(labels[3] == labels[4]);
  CHECK(labels[0] != labels[3]);
  CHECK(kmeans(pts, 2, 2, 3) == labels);
}

TEST_CASE("collaborative index on two disconnected pairs") {
  const auto s = clique_split({{"a", "b"}, {"c", "d"}});
  const auto res = collaborative_index(s, {2, 3, 42});
  auto ids = [&](const char* raw) { return res.map.find(raw)->tokens; };
  CHECK(ids("a")[0] == ids("b")[0]);
  CHECK(ids("c")[0] == ids("d")[0]);
  CHECK(ids("a")[0] != ids("c")[0]);
  std::set<std::string> top{ids("a")[0], ids("c")[0]};
  CHECK(top == std::set<std::string>{"<CI1>", "<CI2>"});
  CHECK(ids("a") == std::vector<std::string>{ids("a")[0], "<I1>"});
  CHECK(ids("b") == std::vector<std::string>{ids("a")[0], "<I2>"});
}

TEST_CASE("small item set needs no cluster tokens") {
  SplitLog s;
  s.users.push_back(make_user("u", {"a", "b"}, "a", "b"));
  const auto res = collaborative_index(s, {2, 3, 1});
  CHECK(res.map.find("a")->tokens == std::vector<std::string>{"<I1>"});
  CHECK(res.map.find("b")->tokens == std::vector<std::string>{"<I2>"});
  CHECK(res.tree.nodes.size() == 1);
}

TEST_CASE("invalid configuration") {
  SplitLog s = clique_split({{"a", "b"}});
  CHECK_THROWS_AS(collaborative_index(s, {1, 3, 1}), Error);
  CHECK_THROWS_AS(collaborative_index(s, {2, 1, 1}), Error);
}

TEST_CASE("tree invariants on random logs") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto split = testing::random_split(rng, 10 + rng.below(40), 20 + rng.below(150), 3, 15);
    const CollabConfig cfg{2 + rng.below(5), 3 + rng.below(20), rng.next()};
    const auto res = collaborative_index(split, cfg);
    const auto items = split.item_universe();
    CHECK(res.map.size() == items.size());
    std::set<std::string> joined;
    for (const auto& e : res.map.entries()) joined.insert(e.tokens.joined());
    CHECK(joined.size() == items.size());

    const auto& nodes = res.tree.nodes;
    std::size_t leaf_items = 0;
    for (const auto& n : nodes) {
      if (!n.is_leaf()) continue;
      CHECK(n.items.size() < cfg.max_leaf);
      leaf_items += n.items.size();
    }
    CHECK(leaf_items == items.size());

    // Items share their first t cluster tokens iff they share the depth-t node.
    std::vector<std::vector<std::size_t>> ancestry(res.tree.items.size());
    for (std::size_t id = 0; id < nodes.size(); ++id)
      for (auto item : nodes[id].items) ancestry[item].push_back(id);
    for (std::size_t i = 0; i < res.tree.items.size(); ++i) {
      const auto& ti = res.map.find(res.tree.items[i])->tokens;
      for (std::size_t j = i + 1; j < res.tree.items.size(); ++j) {
        const auto& tj = res.map.find(res.tree.items[j])->tokens;
        std::size_t shared_nodes = 0;
        while (shared_nodes < ancestry[i].size() && shared_nodes < ancestry[j].size() &&
               ancestry[i][shared_nodes] == ancestry[j][shared_nodes])
          ++shared_nodes;
        std::size_t shared_tokens = 0;
        while (shared_tokens < ti.size() && shared_tokens < tj.size() && ti[shared_tokens] == tj[shared_tokens] &&
               ti[shared_tokens].starts_with("<CI"))
          ++shared_tokens;
        CHECK(shared_nodes == shared_tokens + 1);
      }
    }
    CHECK(collaborative_index(split, cfg).map == res.map);
  }
}

TEST_CASE("relabeling items permutes cluster membership") {
  const std::vector<std::vector<std::string>> cliques{{"a", "b", "c", "d"}, {"e", "f", "g"}, {"h", "i", "j", "k"}};
  auto renamed = cliques;
  for (auto& c : renamed)
    for (auto& x : c) x = "r" + x;
  std::reverse(renamed.begin(), renamed.end());
  const auto g1 = build_cooccurrence(clique_split(cliques));
  const auto g2 = build_cooccurrence(clique_split(renamed));
  auto strip = [](std::set<std::set<std::string>> sets) {
    std::set<std::set<std::string>> out;
    for (const auto& s : sets) {
      std::set<std::string> t;
      for (const auto& x : s) t.insert(x[0] == 'r' ? x.substr(1) : x);
      out.insert(t);
    }
    return out;
  };
  CHECK(strip(as_sets(g1, spectral_cluster(g1, 3, 1))) == strip(as_sets(g2, spectral_cluster(g2, 3, 1))));
}
