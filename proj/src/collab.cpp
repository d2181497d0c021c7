#include "forge/collab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "forge/error.hpp"
#include "forge/kernels.hpp"
#include "forge/linalg.hpp"
#include "forge/random.hpp"

namespace forge {

namespace {

constexpr std::string_view kModule = "collab";

// Per-user sets of distinct train items, as indices into the item universe.
using UserItemSets = std::vector<std::vector<std::size_t>>;

UserItemSets encode_train_sets(const SplitLog& split, const std::vector<std::string>& universe) {
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(universe.size());
  for (std::size_t i = 0; i < universe.size(); ++i) index.emplace(universe[i], i);
  UserItemSets sets;
  sets.reserve(split.users.size());
  for (const auto& u : split.users) {
    std::vector<std::size_t> s;
    s.reserve(u.train_history.size());
    for (const auto& item : u.train_history) s.push_back(index.at(item));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    sets.push_back(std::move(s));
  }
  return sets;
}

// Co-occurrence counts among `members` (ascending universe indices).
CooccurrenceGraph restricted_graph(const std::vector<std::string>& universe,
                                   const UserItemSets& sets,
                                   std::span<const std::size_t> members) {
  constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> local(universe.size(), kAbsent);
  CooccurrenceGraph g;
  g.nodes.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    local[members[i]] = i;
    g.nodes.push_back(universe[members[i]]);
  }
  const std::size_t n = members.size();
  g.weights.assign(n * n, 0.0);
  std::vector<std::size_t> present;
  for (const auto& s : sets) {
    present.clear();
    for (std::size_t item : s)
      if (local[item] != kAbsent) present.push_back(local[item]);
    for (std::size_t a = 0; a < present.size(); ++a)
      for (std::size_t b = a + 1; b < present.size(); ++b) {
        g.weights[present[a] * n + present[b]] += 1.0;
        g.weights[present[b] * n + present[a]] += 1.0;
      }
  }
  return g;
}

// Cuts `nodes` (already sorted in the desired order) into `parts` contiguous
// chunks whose sizes differ by at most one, larger chunks first.
Partition balanced_chunks(const std::vector<std::size_t>& nodes, std::size_t parts) {
  Partition out;
  const std::size_t base = nodes.size() / parts;
  const std::size_t extra = nodes.size() % parts;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    if (len == 0) continue;
    out.emplace_back(nodes.begin() + static_cast<std::ptrdiff_t>(pos),
                     nodes.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return out;
}

void canonicalize(Partition& parts) {
  for (auto& p : parts) std::sort(p.begin(), p.end());
  std::erase_if(parts, [](const auto& p) { return p.empty(); });
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

// Row-normalized spectral embedding of the graph restricted to `nodes`
// (all of which have positive degree). Row-major, nodes.size() x dim.
std::vector<double> spectral_embedding(const CooccurrenceGraph& g,
                                       const std::vector<std::size_t>& nodes,
                                       const std::vector<double>& degree, std::size_t dim,
                                       std::uint64_t seed) {
  const std::size_t m = nodes.size();
  std::vector<double> inv_sqrt(m);
  for (std::size_t i = 0; i < m; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[nodes[i]]);

  // L = I - D^-1/2 M D^-1/2; symmetric, so column i is built as row i.
  Eigen::MatrixXd lap(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  std::vector<double> row(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto full = g.row(nodes[i]);
    for (std::size_t j = 0; j < m; ++j) row[j] = full[nodes[j]];
    std::span<double> col(lap.col(static_cast<Eigen::Index>(i)).data(), m);
    kernels::multiply(row, inv_sqrt, col);
    kernels::scale(-inv_sqrt[i], col);
    col[i] += 1.0;
  }

  const auto eig = linalg::smallest_eigenpairs(lap, dim, seed);
  std::vector<double> points(m * dim);
  for (std::size_t i = 0; i < m; ++i) {
    std::span<double> p(points.data() + i * dim, dim);
    for (std::size_t c = 0; c < dim; ++c)
      p[c] = eig.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    const double norm = std::sqrt(kernels::dot(p, p));
    if (norm > 0.0) kernels::scale(1.0 / norm, p);
  }
  return points;
}

Partition median_split(const std::vector<std::size_t>& nodes, std::span<const double> points,
                       std::size_t dim, std::size_t parts) {
  const std::size_t m = nodes.size();
  std::size_t best_coord = 0;
  double best_var = -1.0;
  for (std::size_t c = 0; c < dim; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += points[i * dim + c];
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) var += (points[i * dim + c] - mean) * (points[i * dim + c] - mean);
    if (var > best_var) {
      best_var = var;
      best_coord = c;
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a * dim + best_coord] < points[b * dim + best_coord];
  });
  std::vector<std::size_t> sorted(m);
  for (std::size_t i = 0; i < m; ++i) sorted[i] = nodes[order[i]];
  return balanced_chunks(sorted, parts);
}

}  // namespace

CooccurrenceGraph build_cooccurrence(const SplitLog& split) {
  const auto universe = split.item_universe();
  const auto sets = encode_train_sets(split, universe);
  std::vector<std::size_t> all(universe.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return restricted_graph(universe, sets, all);
}

std::vector<std::size_t> kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                                std::uint64_t seed, std::size_t max_iterations) {
  const std::size_t m = dim == 0 ? 0 : points.size() / dim;
  std::vector<std::size_t> labels(m, 0);
  if (m == 0 || k <= 1) return labels;
  k = std::min(k, m);
  auto point = [&](std::size_t i) { return points.subspan(i * dim, dim); };

  // k-means++ seeding
  Rng rng({seed, 0x6b6d65616e73ULL});
  std::vector<double> centers;
  centers.reserve(k * dim);
  std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
  std::size_t chosen = static_cast<std::size_t>(rng.below(m));
  for (std::size_t c = 0; c < k; ++c) {
    auto p = point(chosen);
    centers.insert(centers.end(), p.begin(), p.end());
    std::span<const double> center(centers.data() + c * dim, dim);
    for (std::size_t i = 0; i < m; ++i)
      nearest[i] = std::min(nearest[i], kernels::squared_distance(point(i), center));
    if (c + 1 == k) break;
    const double total = kernels::sum(nearest);
    if (total <= 0.0) {
      // every point coincides with a center; later empty-cluster repair handles it
      chosen = (chosen + 1) % m;
      continue;
    }
    double r = rng.unit() * total;
    chosen = m - 1;
    for (std::size_t i = 0; i < m; ++i) {
      if (nearest[i] <= 0.0) continue;
      r -= nearest[i];
      if (r < 0.0) {
        chosen = i;
        break;
      }
    }
    while (nearest[chosen] <= 0.0 && chosen > 0) --chosen;
  }

  std::vector<double> dist(m);
  auto assign = [&]() {
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = kernels::squared_distance(point(i), {centers.data() + c * dim, dim});
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist[i] = best_d;
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    return changed;
  };

  assign();
  std::vector<std::size_t> counts(k);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    std::fill(centers.begin(), centers.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      kernels::axpy(1.0, point(i), {centers.data() + labels[i] * dim, dim});
      ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::span<double> center(centers.data() + c * dim, dim);
      if (counts[c] > 0) {
        kernels::scale(1.0 / static_cast<double>(counts[c]), center);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its center.
      std::size_t far = 0;
      for (std::size_t i = 1; i < m; ++i)
        if (dist[i] > dist[far]) far = i;
      auto p = point(far);
      std::copy(p.begin(), p.end(), center.begin());
      dist[far] = 0.0;
    }
    if (!assign() && iter > 0) break;
  }
  return labels;
}

Partition spectral_cluster(const CooccurrenceGraph& graph, std::size_t parts, std::uint64_t seed) {
  const std::size_t n = graph.size();
  if (parts == 0) throw Error(ErrorKind::InvalidConfig, kModule, "cluster count must be >= 1");
  if (n < parts)
    throw Error(ErrorKind::TooFewNodes, kModule,
                std::to_string(n) + " nodes cannot form " + std::to_string(parts) + " clusters");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (parts == 1) return {all};

  std::vector<double> degree(n);
  std::vector<std::size_t> isolated, connected;
  for (std::size_t i = 0; i < n; ++i) {
    degree[i] = kernels::sum(graph.row(i));
    (degree[i] > 0.0 ? connected : isolated).push_back(i);
  }
  if (connected.empty()) return balanced_chunks(all, parts);

  Partition out;
  std::size_t want = isolated.empty() ? parts : parts - 1;
  want = std::min(want, connected.size());
  if (want <= 1) {
    out.push_back(connected);
  } else {
    const auto points = spectral_embedding(graph, connected, degree, want, seed);
    const auto labels = kmeans(points, want, want, seed);
    Partition groups(want);
    for (std::size_t i = 0; i < connected.size(); ++i) groups[labels[i]].push_back(connected[i]);
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    if (groups.size() <= 1) groups = median_split(connected, points, want, want);
    for (auto& g : groups) out.push_back(std::move(g));
  }
  if (!isolated.empty()) out.push_back(std::move(isolated));
  canonicalize(out);
  return out;
}

CollabResult collaborative_index(const SplitLog& split, const CollabConfig& config) {
  if (config.clusters < 2 || config.max_leaf < 2)
    throw Error(ErrorKind::InvalidConfig, kModule,
                "need clusters >= 2 and max_leaf >= 2 (got N=" + std::to_string(config.clusters) +
                    ", k=" + std::to_string(config.max_leaf) + ")");
  CollabResult result;
  auto& tree = result.tree;
  tree.items = split.item_universe();
  const auto sets = encode_train_sets(split, tree.items);
  const std::size_t n = tree.items.size();

  std::vector<TokenSeq> tokens(n);
  ClusterNode root;
  root.items.resize(n);
  std::iota(root.items.begin(), root.items.end(), std::size_t{0});
  tree.nodes.push_back(std::move(root));

  std::size_t next_cluster = 1;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t id = queue.front();
    queue.pop_front();
    if (tree.nodes[id].items.size() < config.max_leaf) {
      const auto& items = tree.nodes[id].items;
      for (std::size_t j = 0; j < items.size(); ++j)
        tokens[items[j]].tokens.push_back("<I" + std::to_string(j + 1) + ">");
      continue;
    }
    const auto members = tree.nodes[id].items;
    const auto graph = restricted_graph(tree.items, sets, members);
    const std::size_t parts = std::min(config.clusters, members.size());
    const auto partition = spectral_cluster(graph, parts, config.seed ^ (id * 0x9e3779b97f4a7c15ULL));
    if (partition.size() < 2)
      throw Error(ErrorKind::NonConvergence, kModule,
                  "split of a " + std::to_string(members.size()) + "-item set made no progress");
    for (const auto& part : partition) {
      ClusterNode child;
      child.token = "<CI" + std::to_string(next_cluster++) + ">";
      child.depth = tree.nodes[id].depth + 1;
      for (std::size_t local : part) {
        child.items.push_back(members[local]);
        tokens[members[local]].tokens.push_back(child.token);
      }
      tree.nodes[id].children.push_back(tree.nodes.size());
      queue.push_back(tree.nodes.size());
      tree.nodes.push_back(std::move(child));
    }
  }

  result.map = IndexMap(IndexMethod::Collaborative, 0);
  for (std::size_t i = 0; i < n; ++i) result.map.add(tree.items[i], std::move(tokens[i]));
  return result;
}

std::string ClusterTree::dump() const {
  std::string out;
  auto visit = [&](auto&& self, std::size_t id) -> void {
    const auto& node = nodes[id];
    std::string indent(node.depth * 2, ' ');
    out += indent + (node.token.empty() ? std::string("root") : node.token) + " (" +
           std::to_string(node.items.size()) + " items)\n";
    if (node.is_leaf()) {
      for (std::size_t j = 0; j < node.items.size(); ++j)
        out += indent + "  <I" + std::to_string(j + 1) + "> " + items[node.items[j]] + "\n";
      return;
    }
    for (std::size_t child : node.children) self(self, child);
  };
  if (!nodes.empty()) visit(visit, 0);
  return out;
}

}  // namespace forge
