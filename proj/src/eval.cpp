#include "forge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "forge/error.hpp"
#include "forge/text.hpp"

namespace forge {

namespace {

constexpr std::string_view kModule = "eval";

}  // namespace

const RankedList* PredictionSet::find(std::string_view query_id) const {
  auto it = by_query.find(std::string(query_id));
  return it == by_query.end() ? nullptr : &lists[it->second];
}

void PredictionSet::add(RankedList list) {
  std::unordered_set<std::string_view> seen;
  for (const auto& item : list.items)
    if (!seen.insert(item).second)
      throw Error(ErrorKind::DuplicateItemInList, kModule,
                  "query " + list.query_id + " lists " + item + " twice");
  if (!by_query.emplace(list.query_id, lists.size()).second)
    throw Error(ErrorKind::DuplicateQuery, kModule, "query " + list.query_id + " appears twice");
  lists.push_back(std::move(list));
}

PredictionSet parse_predictions(std::string_view text) {
  PredictionSet set;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text::strip_provenance(text))) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 ||
        line.find('\t', tab + 1) != std::string_view::npos)
      throw Error(ErrorKind::MalformedLine, kModule,
                  "prediction line " + std::to_string(line_no) + ": expected 'query<TAB>items'");
    RankedList list;
    list.query_id = std::string(line.substr(0, tab));
    for (std::string_view item : text::split_spaces(line.substr(tab + 1)))
      list.items.emplace_back(item);
    set.add(std::move(list));
  }
  return set;
}

std::string write_predictions(std::span<const RankedList> lists) {
  std::string out;
  for (const auto& l : lists) {
    out += l.query_id;
    out += '\t';
    for (std::size_t i = 0; i < l.items.size(); ++i) {
      if (i) out += ' ';
      out += l.items[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<Truth> parse_truth(std::string_view text) {
  std::vector<Truth> out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(text::strip_provenance(text))) {
    ++line_no;
    if (line.empty()) continue;
    auto f = text::split_exact(line, '\t');
    if ((f.size() != 2 && f.size() != 4) || f[0].empty() || f[1].empty())
      throw Error(ErrorKind::MalformedLine, kModule,
                  "truth line " + std::to_string(line_no) +
                      ": expected 'query<TAB>item[<TAB>task<TAB>exposure]'");
    Truth t{std::string(f[0]), std::string(f[1])};
    if (f.size() == 4) {
      t.task = std::string(f[2]);
      t.exposure = std::string(f[3]);
    }
    if (!seen.insert(t.query_id).second)
      throw Error(ErrorKind::DuplicateQuery, kModule, "truth query " + t.query_id + " appears twice");
    out.push_back(std::move(t));
  }
  return out;
}

std::string write_truth(std::span<const Truth> truths) {
  std::string out;
  for (const auto& t : truths) {
    out += t.query_id + '\t' + t.item;
    if (t.task != "all" || t.exposure != "all") out += '\t' + t.task + '\t' + t.exposure;
    out += '\n';
  }
  return out;
}

PredictionSet decode_predictions(const PredictionSet& preds, const IndexMap& index,
                                 std::size_t* unknown) {
  PredictionSet out;
  std::size_t misses = 0;
  for (const auto& list : preds.lists) {
    RankedList decoded;
    decoded.query_id = list.query_id;
    for (const auto& item : list.items) {
      if (const std::string* raw = index.raw_for(item)) {
        decoded.items.push_back(*raw);
      } else {
        ++misses;
        decoded.items.push_back(item);
      }
    }
    out.add(std::move(decoded));
  }
  if (unknown) *unknown = misses;
  return out;
}

HitGain hit_and_gain(const RankedList& ranked, std::string_view truth, std::size_t k) {
  const std::size_t limit = std::min(k, ranked.items.size());
  for (std::size_t i = 0; i < limit; ++i)
    if (ranked.items[i] == truth) return {1, 1.0 / std::log2(static_cast<double>(i + 2))};
  return {};
}

const GroupMetrics* Metrics::find(std::string_view task, std::string_view exposure,
                                  std::size_t k) const {
  for (const auto& r : rows)
    if (r.task == task && r.exposure == exposure && r.k == k) return &r;
  return nullptr;
}

Metrics evaluate(const PredictionSet& preds, std::span<const Truth> truths,
                 std::span<const std::size_t> ks) {
  if (truths.empty()) throw Error(ErrorKind::NoQueries, kModule, "no truth queries to score");
  Metrics m;
  m.ks.assign(ks.begin(), ks.end());
  std::sort(m.ks.begin(), m.ks.end());
  m.ks.erase(std::unique(m.ks.begin(), m.ks.end()), m.ks.end());
  if (m.ks.empty() || m.ks.front() == 0)
    throw Error(ErrorKind::InvalidConfig, kModule, "cutoffs k must be >= 1");

  struct Acc {
    std::vector<double> hits, gains;
    std::size_t n = 0, covered = 0;
  };
  std::map<std::pair<std::string, std::string>, Acc> groups;
  for (const auto& t : truths) {
    Acc& acc = groups[{t.task, t.exposure}];
    if (acc.hits.empty()) {
      acc.hits.assign(m.ks.size(), 0.0);
      acc.gains.assign(m.ks.size(), 0.0);
    }
    ++acc.n;
    const RankedList* ranked = preds.find(t.query_id);
    if (!ranked) continue;
    ++acc.covered;
    for (std::size_t i = 0; i < m.ks.size(); ++i) {
      const HitGain hg = hit_and_gain(*ranked, t.item, m.ks[i]);
      acc.hits[i] += hg.hit;
      acc.gains[i] += hg.gain;
    }
  }
  for (const auto& [key, acc] : groups)
    for (std::size_t i = 0; i < m.ks.size(); ++i) {
      const double n = static_cast<double>(acc.n);
      m.rows.push_back({key.first, key.second, m.ks[i], acc.hits[i] / n, acc.gains[i] / n, acc.n,
                        acc.covered});
    }
  return m;
}

std::string format_metrics(const Metrics& metrics) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-28s %8s", "group", "queries");
  out += buf;
  for (std::size_t k : metrics.ks) {
    std::snprintf(buf, sizeof buf, " %9s %9s", ("HR@" + std::to_string(k)).c_str(),
                  ("NDCG@" + std::to_string(k)).c_str());
    out += buf;
  }
  out += '\n';
  std::string kv;
  for (std::size_t r = 0; r < metrics.rows.size(); r += metrics.ks.size()) {
    const auto& first = metrics.rows[r];
    const std::string group = first.task + "/" + first.exposure;
    std::snprintf(buf, sizeof buf, "%-28s %8zu", group.c_str(), first.n_queries);
    out += buf;
    for (std::size_t i = 0; i < metrics.ks.size(); ++i) {
      const auto& row = metrics.rows[r + i];
      std::snprintf(buf, sizeof buf, " %9.4f %9.4f", row.hr, row.ndcg);
      out += buf;
      std::snprintf(buf, sizeof buf, "hr@%zu[%s]=%.6f\nndcg@%zu[%s]=%.6f\n", row.k, group.c_str(),
                    row.hr, row.k, group.c_str(), row.ndcg);
      kv += buf;
    }
    out += '\n';
    std::snprintf(buf, sizeof buf, "coverage[%s]=%zu/%zu\n", group.c_str(), first.covered,
                  first.n_queries);
    kv += buf;
  }
  return out + "\n" + kv;
}

}  // namespace forge
