#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bevclust/errors.hpp"
#include "bevclust/geometry.hpp"

namespace bevclust {

/// Undirected graph over point indices. Edges are stored once as (u, v) with
/// u < v, sorted and deduplicated, so the representation is symmetric and
/// self-loop free by construction.
struct AdjacencyGraph {
  std::size_t node_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

/// Component ids per node, dense in [0, component_count), assigned in order of
/// first appearance by node index.
struct ComponentLabeling {
  std::vector<std::uint32_t> labels;
  std::uint32_t component_count = 0;
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  }

  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {  // path compression
      const std::uint32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> rank_;
};

/// Union-find based component extraction, O(E * alpha(N)).
ComponentLabeling connected_components(const AdjacencyGraph& graph);

/// Dense relabeling of union-find roots in first-appearance order.
ComponentLabeling components_from_union_find(UnionFind& uf, std::size_t node_count);

/// Builds the symmetric kNN graph: edge (u, v) is present iff v is among u's k
/// nearest neighbors (or u among v's) and distance(u, v) <= threshold_fn(u, v).
/// Edges at exactly the threshold distance are kept.
template <typename ThresholdFn>
AdjacencyGraph build_threshold_graph(const KdTree2& tree, std::size_t k, ThresholdFn&& threshold_fn) {
  if (k < 1) throw ContractViolation("build_threshold_graph: k must be >= 1");
  AdjacencyGraph g;
  g.node_count = tree.size();
  std::vector<Neighbor> nn;
  for (std::uint32_t u = 0; u < g.node_count; ++u) {
    tree.knn(u, k, nn);
    for (const Neighbor& n : nn) {
      if (n.distance <= threshold_fn(u, n.index)) {
        const auto v = static_cast<std::uint32_t>(n.index);
        g.edges.emplace_back(std::min(u, v), std::max(u, v));
      }
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

template <typename ThresholdFn>
AdjacencyGraph build_threshold_graph(std::span<const Point2> points, std::size_t k,
                                     ThresholdFn&& threshold_fn) {
  return build_threshold_graph(KdTree2(std::vector<Point2>(points.begin(), points.end())), k,
                               std::forward<ThresholdFn>(threshold_fn));
}

}  // namespace bevclust
