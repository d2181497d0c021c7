#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forge/indexing.hpp"
#include "forge/ingest.hpp"

namespace forge {

/// Symmetric item-item co-occurrence counts with a zero diagonal.
/// weight(i, j) = number of users whose train history contains both items.
struct CooccurrenceGraph {
  std::vector<std::string> nodes;  // first-appearance order
  std::vector<double> weights;     // row-major, nodes.size()^2

  std::size_t size() const { return nodes.size(); }
  double weight(std::size_t i, std::size_t j) const { return weights[i * nodes.size() + j]; }
  std::span<const double> row(std::size_t i) const {
    return {weights.data() + i * nodes.size(), nodes.size()};
  }
};

/// Parts of a node set; each part lists node indices ascending, and parts
/// are ordered by their smallest member.
using Partition = std::vector<std::vector<std::size_t>>;

struct CollabConfig {
  std::size_t clusters = 20;   // N, parts per split
  std::size_t max_leaf = 100;  // k, sets smaller than this become leaves
  std::uint64_t seed = 42;
};

struct ClusterNode {
  std::string token;                // "<CIn>", empty for the root
  std::vector<std::size_t> items;   // indices into ClusterTree::items
  std::vector<std::size_t> children;
  std::size_t depth = 0;

  bool is_leaf() const { return children.empty(); }
};

struct ClusterTree {
  std::vector<std::string> items;  // raw IDs, first-appearance order
  std::vector<ClusterNode> nodes;  // nodes[0] is the root, breadth-first order

  /// Indented text, one line per node and one per leaf item.
  std::string dump() const;
};

struct CollabResult {
  IndexMap map;
  ClusterTree tree;
};

/// Graph over split.item_universe(); items that only occur as val/test
/// targets become isolated nodes.
CooccurrenceGraph build_cooccurrence(const SplitLog& split);

/// Normalized spectral clustering into at most `parts` parts.
///
/// Zero-degree nodes are set aside as one part of their own and the rest is
/// embedded with the eigenvectors of the smallest eigenvalues of
/// I - D^-1/2 M D^-1/2, row-normalized, then grouped by seeded k-means++.
/// If k-means collapses to a single group the nodes are cut into balanced
/// quantiles of the highest-variance embedding coordinate instead.
Partition spectral_cluster(const CooccurrenceGraph& graph, std::size_t parts, std::uint64_t seed);

/// Lloyd's k-means on row-major points with k-means++ seeding. Returns one
/// label in [0, k) per point. Ties go to the lower center index.
std::vector<std::size_t> kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                                std::uint64_t seed, std::size_t max_iterations = 100);

/// Breadth-first hierarchical indexing: sets of at least max_leaf items are
/// split by spectral clustering of their co-occurrence counts (recounted from
/// the training histories) and every part gets a fresh "<CIn>" token; smaller
/// sets give each member a leaf token "<I1>", "<I2>", ...
CollabResult collaborative_index(const SplitLog& split, const CollabConfig& config);

}  // namespace forge
