#include "forge/scheduler.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "forge/error.hpp"
#include "forge/random.hpp"

namespace forge {

namespace {

struct Group {
  std::string dataset;
  Task task;
  std::vector<std::size_t> members;
  std::vector<std::vector<std::size_t>> epoch;  // current epoch's batches
  std::size_t cursor = 0;
  std::uint64_t epoch_no = 0;
};

void start_epoch(Group& g, std::size_t group_no, std::size_t batch_size, std::uint64_t seed) {
  std::vector<std::size_t> order = g.members;
  Rng rng({seed, group_no, g.epoch_no});
  rng.shuffle(std::span<std::size_t>(order));
  g.epoch.clear();
  for (std::size_t pos = 0; pos < order.size(); pos += batch_size) {
    const std::size_t end = std::min(order.size(), pos + batch_size);
    g.epoch.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(pos),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  g.cursor = 0;
}

}  // namespace

BatchPlan plan_batches(const Corpus& corpus, std::size_t batch_size, std::uint64_t seed) {
  if (batch_size == 0) throw Error(ErrorKind::InvalidConfig, "scheduler", "batch size must be >= 1");
  std::map<std::pair<std::string, std::string>, Group> by_key;
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    const auto& e = corpus.examples[i];
    auto [it, inserted] =
        by_key.try_emplace({e.dataset, std::string(to_string(e.task))}, Group{e.dataset, e.task, {}, {}, 0, 0});
    it->second.members.push_back(i);
  }
  if (by_key.empty()) throw Error(ErrorKind::EmptyPlan, "scheduler", "corpus has no examples");

  std::vector<Group> groups;
  for (auto& [key, g] : by_key) groups.push_back(std::move(g));
  std::size_t rounds = 0;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    start_epoch(groups[gi], gi, batch_size, seed);
    rounds = std::max(rounds, groups[gi].epoch.size());
  }

  BatchPlan plan;
  plan.batch_size = batch_size;
  plan.seed = seed;
  plan.batches.reserve(rounds * groups.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      Group& g = groups[gi];
      if (g.cursor == g.epoch.size()) {
        ++g.epoch_no;
        start_epoch(g, gi, batch_size, seed);
      }
      plan.batches.push_back({g.dataset, g.task, g.epoch[g.cursor++]});
    }
  }
  return plan;
}

std::string write_plan(const BatchPlan& plan) {
  std::string out;
  for (const auto& b : plan.batches) {
    out += b.dataset;
    out += '\t';
    out += to_string(b.task);
    out += '\t';
    for (std::size_t i = 0; i < b.indices.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(b.indices[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace forge
