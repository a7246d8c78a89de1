#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bevclust/class_config.hpp"
#include "bevclust/cluster.hpp"
#include "bevclust/geometry.hpp"
#include "bevclust/graph.hpp"
#include "bevclust/metrics.hpp"

namespace bevclust::oracle {

// Brute-force reference implementations. Each is asymptotically slower than
// its production counterpart but semantically authoritative; they ship in a
// separate library target so the same verification can be run downstream.

/// Exhaustive kNN by scanning all points, with the production tie-break
/// (ascending distance, then ascending index) and the same distance
/// arithmetic, so boundary ties agree bit-for-bit.
std::vector<Neighbor> knn_linear_scan(std::span<const Point2> points, std::size_t query_index,
                                      std::size_t k);

/// O(n^3) hull via the all-pairs half-plane test: a directed edge (a, b) is on
/// the CCW hull iff every other point lies on its left. Assumes points in
/// general position (no three collinear after deduplication). Returns vertices
/// CCW starting at the lexicographically smallest.
std::vector<Point2> convex_hull_bruteforce(std::span<const Point2> points);

/// Breadth-first component labeling with the same first-appearance rule as the
/// union-find path.
ComponentLabeling bfs_components(const AdjacencyGraph& graph);

/// Components of the exact radius graph {(u,v): d(u,v) <= t} over all pairs.
/// Distances go through sqrt exactly like the production comparison. Refuses
/// inputs above 5000 points.
ComponentLabeling radius_cluster_bruteforce(std::span<const Point2> points, double t);

/// Minimum-area bounding box over a dense orientation sweep of [0, pi/2) with
/// the given step (the axis-aligned box area is pi/2-periodic).
OrientedBox2D min_box_sweep(std::span<const Point2> points, double angle_step);

/// Maximum-cardinality IoU > 0.5 matching by enumeration. Refuses inputs with
/// more than 10 segments on either side. Must coincide with the production
/// greedy matching.
std::vector<SegmentMatch> match_exhaustive(const InstanceLabeling& pred,
                                           const InstanceLabeling& gt, std::uint32_t class_id,
                                           const ClassConfig& config);

}  // namespace bevclust::oracle
