#include "forge/genrec.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "forge/error.hpp"
#include "forge/kernels.hpp"
#include "forge/text.hpp"

namespace forge {

namespace {

constexpr std::string_view kModule = "genrec";
constexpr std::size_t kNpos = static_cast<std::size_t>(-1);

}  // namespace

ItemTrie ItemTrie::build(const IndexMap& index) {
  if (index.empty()) throw Error(ErrorKind::EmptyMap, kModule, "index map has no entries");
  ItemTrie trie;
  trie.nodes_.emplace_back();
  for (const auto& entry : index.entries()) {
    std::uint32_t cur = 0;
    for (const auto& tok : entry.tokens.tokens) {
      if (trie.nodes_[cur].item != kNoItem)
        throw Error(ErrorKind::PrefixCollision, kModule,
                    "id of " + trie.items_[trie.nodes_[cur].item] + " is a prefix of " +
                        entry.raw_id + "'s id");
      auto& kids = trie.nodes_[cur].children;
      auto it = std::lower_bound(kids.begin(), kids.end(), tok,
                                 [](const auto& child, const std::string& t) { return child.first < t; });
      if (it != kids.end() && it->first == tok) {
        cur = it->second;
        continue;
      }
      const auto next = static_cast<std::uint32_t>(trie.nodes_.size());
      kids.insert(it, {tok, next});
      Node child;
      child.parent = cur;
      trie.nodes_.push_back(std::move(child));
      cur = next;
    }
    if (!trie.nodes_[cur].children.empty())
      throw Error(ErrorKind::PrefixCollision, kModule,
                  "id of " + entry.raw_id + " is a prefix of another item's id");
    if (trie.nodes_[cur].item != kNoItem)
      throw Error(ErrorKind::NonBijectiveMap, kModule, "two items share the id of " + entry.raw_id);
    trie.nodes_[cur].item = static_cast<std::uint32_t>(trie.items_.size());
    trie.items_.push_back(entry.raw_id);
  }
  return trie;
}

std::optional<std::uint32_t> ItemTrie::walk(const TokenSeq& tokens) const {
  std::uint32_t cur = 0;
  for (const auto& tok : tokens.tokens) {
    const auto& kids = nodes_[cur].children;
    auto it = std::lower_bound(kids.begin(), kids.end(), tok,
                               [](const auto& child, const std::string& t) { return child.first < t; });
    if (it == kids.end() || it->first != tok) return std::nullopt;
    cur = it->second;
  }
  return cur;
}

const std::string* ItemTrie::item_for(const TokenSeq& tokens) const {
  auto node = walk(tokens);
  if (!node || nodes_[*node].item == kNoItem) return nullptr;
  return &items_[nodes_[*node].item];
}

TokenSeq ItemTrie::path(std::uint32_t node) const {
  TokenSeq seq;
  while (node != 0) {
    const std::uint32_t parent = nodes_[node].parent;
    for (const auto& [tok, child] : nodes_[parent].children)
      if (child == node) {
        seq.tokens.push_back(tok);
        break;
      }
    node = parent;
  }
  std::reverse(seq.tokens.begin(), seq.tokens.end());
  return seq;
}

BaselineModel fit_baseline(const SplitLog& split, const IndexMap& index, double alpha) {
  BaselineModel m;
  m.alpha = alpha;
  for (const auto& e : index.entries()) {
    m.item_index.emplace(e.raw_id, m.items.size());
    m.items.push_back(e.raw_id);
  }
  const std::size_t n = m.items.size();
  m.popularity.assign(n, 0.0);
  std::vector<std::map<std::size_t, double>> trans(n);
  auto idx = [&](const std::string& raw) {
    auto it = m.item_index.find(raw);
    if (it == m.item_index.end())
      throw Error(ErrorKind::MissingIndexEntry, kModule, "item " + raw + " is not indexed");
    return it->second;
  };
  for (const auto& u : split.users) {
    for (std::size_t i = 0; i < u.train_history.size(); ++i) {
      const std::size_t cur = idx(u.train_history[i]);
      m.popularity[cur] += 1.0;
      if (i > 0) trans[idx(u.train_history[i - 1])][cur] += 1.0;
    }
  }
  m.total_popularity = kernels::sum(m.popularity);
  m.transitions.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    m.transitions[i].assign(trans[i].begin(), trans[i].end());
  return m;
}

std::vector<double> BaselineModel::scores(std::string_view last_item) const {
  std::vector<double> s = popularity;
  if (total_popularity <= 0.0) return s;
  const std::vector<std::pair<std::size_t, double>>* row = nullptr;
  if (auto it = item_index.find(std::string(last_item)); it != item_index.end())
    if (!transitions[it->second].empty()) row = &transitions[it->second];
  if (!row) {
    kernels::scale(1.0 / total_popularity, s);
    return s;
  }
  kernels::scale(alpha / total_popularity, s);
  for (const auto& [next, count] : *row) s[next] += count;
  return s;
}

bool item_id_less(std::string_view a, std::string_view b) {
  if (text::is_digits(a) && text::is_digits(b) && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

ConstrainedDecoder::ConstrainedDecoder(const BaselineModel& model, const ItemTrie& trie)
    : model_(model), trie_(trie) {
  model_index_.reserve(trie.item_count());
  for (const auto& raw : trie.items()) {
    auto it = model.item_index.find(raw);
    model_index_.push_back(it == model.item_index.end() ? kNpos : it->second);
  }
}

RankedList ConstrainedDecoder::decode(const Query& query, const DecodeOptions& options) const {
  if (options.k == 0 || options.beam_width < options.k)
    throw Error(ErrorKind::InvalidConfig, kModule, "need k >= 1 and beam width >= k");

  const auto& nodes = trie_.nodes();
  const std::vector<double> item_scores =
      model_.scores(query.history.empty() ? std::string_view{} : std::string_view(query.history.back()));

  std::unordered_set<std::string_view> excluded(query.history.begin(), query.history.end());
  std::unordered_set<std::string_view> allowed;
  if (query.candidates) allowed.insert(query.candidates->begin(), query.candidates->end());

  // Subtree mass and eligible-item counts, accumulated leaves-up.
  std::vector<double> mass(nodes.size(), 0.0);
  std::vector<std::uint32_t> eligible(nodes.size(), 0);
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const std::uint32_t item = nodes[v].item;
    if (item == ItemTrie::kNoItem) continue;
    const std::string& raw = trie_.items()[item];
    if (excluded.contains(raw)) continue;
    if (query.candidates && !allowed.contains(raw)) continue;
    eligible[v] = 1;
    mass[v] = model_index_[item] == kNpos ? 0.0 : item_scores[model_index_[item]];
  }
  for (std::size_t v = nodes.size(); v-- > 1;) {
    mass[nodes[v].parent] += mass[v];
    eligible[nodes[v].parent] += eligible[v];
  }
  const double root_mass = mass[0] > 0.0 ? mass[0] : 1.0;

  struct Hyp {
    double score;
    std::uint32_t node;
  };
  std::vector<Hyp> completed;
  std::vector<std::uint32_t> active{0};
  std::vector<Hyp> expanded;
  while (!active.empty()) {
    expanded.clear();
    for (std::uint32_t a : active)
      for (const auto& [tok, child] : nodes[a].children)
        if (eligible[child] > 0) expanded.push_back({mass[child] / root_mass, child});
    std::stable_sort(expanded.begin(), expanded.end(),
                     [](const Hyp& x, const Hyp& y) { return x.score > y.score; });
    if (expanded.size() > options.beam_width) expanded.resize(options.beam_width);
    active.clear();
    for (const Hyp& h : expanded) {
      if (nodes[h.node].item != ItemTrie::kNoItem)
        completed.push_back(h);
      else
        active.push_back(h.node);
    }
  }

  std::sort(completed.begin(), completed.end(), [&](const Hyp& x, const Hyp& y) {
    if (x.score != y.score) return x.score > y.score;
    return item_id_less(trie_.items()[nodes[x.node].item], trie_.items()[nodes[y.node].item]);
  });
  RankedList out;
  out.query_id = query.id;
  for (std::size_t i = 0; i < completed.size() && out.items.size() < options.k; ++i)
    out.items.push_back(trie_.items()[nodes[completed[i].node].item]);
  return out;
}

RankedList beam_decode(const BaselineModel& model, const ItemTrie& trie, const Query& query,
                       const DecodeOptions& options) {
  return ConstrainedDecoder(model, trie).decode(query, options);
}

}  // namespace forge
