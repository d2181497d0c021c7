#include <doctest.h>

#include <cmath>

#include "forge/error.hpp"
#include "forge/eval.hpp"
#include "forge/indexing.hpp"
#include "support.hpp"

using namespace forge;

TEST_CASE("prediction parsing") {
  const auto preds = parse_predictions("u1\t1003 1001 1007\n");
  REQUIRE(preds.lists.size() == 1);
  CHECK(preds.find("u1")->items.size() == 3);
  CHECK(parse_predictions("").lists.empty());
  CHECK_THROWS_AS(parse_predictions("u1\t1003 1003\n"), Error);
  CHECK_THROWS_AS(parse_predictions("u1\t1\nu1\t2\n"), Error);
  CHECK(parse_predictions(write_predictions(preds.lists)).lists == preds.lists);
}

TEST_CASE("truth parsing") {
  const auto t = parse_truth("u1\t5\nu2\t6\tsequential\tunseen\n");
  REQUIRE(t.size() == 2);
  CHECK(t[0].task == "all");
  CHECK(t[1].exposure == "unseen");
  CHECK(parse_truth(write_truth(t)).size() == 2);
  CHECK_THROWS_AS(parse_truth("u1\n"), Error);
}

TEST_CASE("hit and gain") {
  const RankedList r{"q", {"a", "b", "c", "d", "e", "f", "g"}};
  CHECK(hit_and_gain(r, "a", 5).hit == 1);
  CHECK(hit_and_gain(r, "a", 5).gain == 1.0);
  CHECK(hit_and_gain(r, "c", 5).gain == 0.5);
  CHECK(hit_and_gain(r, "g", 5).hit == 0);
  CHECK(hit_and_gain(r, "g", 5).gain == 0.0);
  CHECK(hit_and_gain(r, "zz", 10).hit == 0);
}

TEST_CASE("evaluate") {
  PredictionSet p;
  p.add({"q1", {"a", "b"}});
  p.add({"q2", {"c", "d"}});
  const Truth t[] = {{"q1", "a"}, {"q2", "x"}};
  const std::size_t ks[] = {5};
  const auto m = evaluate(p, t, ks);
  CHECK(m.find("all", "all", 5)->hr == 0.5);

  const Truth all_hit[] = {{"q1", "a"}, {"q2", "c"}};
  const std::size_t ks2[] = {1, 5, 10};
  const auto m2 = evaluate(p, all_hit, ks2);
  for (auto k : ks2) {
    CHECK(m2.find("all", "all", k)->hr == 1.0);
    CHECK(m2.find("all", "all", k)->ndcg == 1.0);
  }
}

TEST_CASE("missing predictions are misses") {
  PredictionSet p;
  p.add({"q1", {"a"}});
  const Truth t[] = {{"q1", "a"}, {"q2", "b"}};
  const std::size_t ks[] = {5};
  const auto row = evaluate(p, t, ks).find("all", "all", 5);
  CHECK(row->hr == 0.5);
  CHECK(row->covered == 1);
  CHECK(row->n_queries == 2);
  CHECK_THROWS_AS(evaluate(p, {}, ks), Error);
  const std::size_t zero[] = {0};
  CHECK_THROWS_AS(evaluate(p, t, zero), Error);
}

TEST_CASE("groups, invariants and report") {
  Rng rng(4);
  PredictionSet p;
  std::vector<Truth> truths;
  for (int q = 0; q < 100; ++q) {
    RankedList r{"q" + std::to_string(q), {}};
    for (int i = 0; i < 12; ++i) r.items.push_back(std::to_string(q * 100 + i));
    truths.push_back({r.query_id, std::to_string(q * 100 + static_cast<int>(rng.below(20))),
                      q % 2 ? "sequential" : "straightforward", q % 3 ? "seen" : "unseen"});
    p.add(std::move(r));
  }
  const std::size_t ks[] = {5, 10};
  const auto m = evaluate(p, truths, ks);
  CHECK(m.rows.size() > 2);
  for (const auto& row : m.rows) CHECK(row.ndcg <= row.hr);
  for (const auto& row : m.rows)
    if (row.k == 5) {
      const auto* ten = m.find(row.task, row.exposure, 10);
      CHECK(row.hr <= ten->hr);
      CHECK(row.ndcg <= ten->ndcg);
    }
  auto shuffled = truths;
  rng.shuffle(std::span<Truth>(shuffled));
  const auto m2 = evaluate(p, shuffled, ks);
  for (std::size_t i = 0; i < m.rows.size(); ++i) CHECK(m.rows[i].hr == m2.rows[i].hr);
  const auto report = format_metrics(m);
  CHECK(report.find("HR@5") != std::string::npos);
  CHECK(report.find("NDCG@10") != std::string::npos);
  CHECK(report.find("hr@5[sequential/seen]=") != std::string::npos);
}

TEST_CASE("decode predictions through an index map") {
  IndexMap map(IndexMethod::Sequential, 1001);
  map.add("apple", tokenize_number("1001"));
  map.add("pear", tokenize_number("1002"));
  PredictionSet p;
  p.add({"q", {"1002", "1001", "9999"}});
  std::size_t unknown = 0;
  const auto d = decode_predictions(p, map, &unknown);
  CHECK(d.find("q")->items == std::vector<std::string>{"pear", "apple", "9999"});
  CHECK(unknown == 1);
}
