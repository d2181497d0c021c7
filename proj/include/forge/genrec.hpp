#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "forge/eval.hpp"
#include "forge/indexing.hpp"
#include "forge/ingest.hpp"

namespace forge {

/// Prefix tree over item token sequences. Every root-to-terminal path is one
/// item's TokenSeq; terminals are always leaves.
class ItemTrie {
 public:
  static constexpr std::uint32_t kNoItem = ~std::uint32_t{0};

  struct Node {
    std::vector<std::pair<std::string, std::uint32_t>> children;  // sorted by token
    std::uint32_t parent = 0;
    std::uint32_t item = kNoItem;  // index into items()
  };

  /// Throws EmptyMap, or PrefixCollision if one sequence is a strict prefix
  /// of another.
  static ItemTrie build(const IndexMap& index);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::string>& items() const { return items_; }
  std::size_t item_count() const { return items_.size(); }

  /// Node reached by following `tokens`, if the path exists.
  std::optional<std::uint32_t> walk(const TokenSeq& tokens) const;
  /// Raw ID of the item spelled by `tokens`, if it is a complete item path.
  const std::string* item_for(const TokenSeq& tokens) const;
  /// Token path from the root to `node`.
  TokenSeq path(std::uint32_t node) const;

 private:
  std::vector<Node> nodes_;  // nodes_[0] is the root; parents precede children
  std::vector<std::string> items_;
};

/// Popularity-smoothed first-order Markov scorer over train histories.
/// score(next | last) is proportional to trans[last][next] + alpha *
/// pop[next] / sum(pop); a last item without outgoing transitions falls back
/// to pop[next] / sum(pop).
struct BaselineModel {
  std::vector<std::string> items;
  std::unordered_map<std::string, std::size_t> item_index;
  std::vector<double> popularity;
  double total_popularity = 0.0;
  std::vector<std::vector<std::pair<std::size_t, double>>> transitions;  // by last item
  double alpha = 1.0;

  /// Unnormalized score of every item given the last history item.
  std::vector<double> scores(std::string_view last_item) const;
};

BaselineModel fit_baseline(const SplitLog& split, const IndexMap& index, double alpha);

struct Query {
  std::string id;
  std::vector<std::string> history;  // raw IDs, chronological
  std::optional<std::vector<std::string>> candidates;  // restrict the catalog
};

struct DecodeOptions {
  std::size_t k = 10;
  std::size_t beam_width = 20;
};

/// Orders IDs numerically when both are digit strings, lexicographically
/// otherwise.
bool item_id_less(std::string_view a, std::string_view b);

/// Beam search over the trie where a prefix is worth the model mass of the
/// eligible items below it, i.e. the product of per-token conditionals a
/// language model would assign. Items in the query history are never emitted.
class ConstrainedDecoder {
 public:
  ConstrainedDecoder(const BaselineModel& model, const ItemTrie& trie);

  RankedList decode(const Query& query, const DecodeOptions& options) const;

 private:
  const BaselineModel& model_;
  const ItemTrie& trie_;
  std::vector<std::size_t> model_index_;  // trie item -> model item (or npos)
};

RankedList beam_decode(const BaselineModel& model, const ItemTrie& trie, const Query& query,
                       const DecodeOptions& options);

}  // namespace forge
