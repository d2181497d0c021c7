#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forge/indexing.hpp"

namespace forge {

struct RankedList {
  std::string query_id;
  std::vector<std::string> items;  // best first, no duplicates

  bool operator==(const RankedList&) const = default;
};

struct PredictionSet {
  std::vector<RankedList> lists;  // file order
  std::unordered_map<std::string, std::size_t> by_query;

  const RankedList* find(std::string_view query_id) const;
  /// Throws DuplicateQuery / DuplicateItemInList.
  void add(RankedList list);
};

/// `query_id<TAB>item item ...` per line.
PredictionSet parse_predictions(std::string_view text);
std::string write_predictions(std::span<const RankedList> lists);

/// Ground truth for one query. task/exposure label the reporting group.
struct Truth {
  std::string query_id;
  std::string item;
  std::string task = "all";
  std::string exposure = "all";
};

/// `query_id<TAB>item_id[<TAB>task<TAB>exposure]` per line.
std::vector<Truth> parse_truth(std::string_view text);
std::string write_truth(std::span<const Truth> truths);

/// Maps predicted token-string IDs back to raw item IDs. Strings that are
/// not in the map are left untouched and counted in *unknown.
PredictionSet decode_predictions(const PredictionSet& preds, const IndexMap& index,
                                 std::size_t* unknown = nullptr);

struct HitGain {
  int hit = 0;
  double gain = 0.0;
};

/// Single-target leave-one-out: hit iff the truth is in the first k entries;
/// gain = 1 / log2(rank + 1) for a 1-based rank, so NDCG@k equals the gain.
HitGain hit_and_gain(const RankedList& ranked, std::string_view truth, std::size_t k);

struct GroupMetrics {
  std::string task;
  std::string exposure;
  std::size_t k = 0;
  double hr = 0.0;
  double ndcg = 0.0;
  std::size_t n_queries = 0;
  std::size_t covered = 0;  // queries that had a prediction line
};

struct Metrics {
  std::vector<std::size_t> ks;
  std::vector<GroupMetrics> rows;  // grouped by (task, exposure), then ascending k

  const GroupMetrics* find(std::string_view task, std::string_view exposure, std::size_t k) const;
};

/// Queries without a prediction count as misses.
Metrics evaluate(const PredictionSet& preds, std::span<const Truth> truths,
                 std::span<const std::size_t> ks);

/// Aligned table (HR@k, NDCG@k columns per k) followed by key=value lines.
std::string format_metrics(const Metrics& metrics);

}  // namespace forge
