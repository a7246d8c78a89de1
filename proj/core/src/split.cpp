#include "bevclust/split.hpp"

#include <algorithm>
#include <utility>

#include "bevclust/errors.hpp"
#include "bevclust/graph.hpp"

namespace bevclust {

namespace {

constexpr int kMaxDepth = 64;

// The point subset is fixed across the dichotomy; only the threshold moves.
// The k nearest neighbors are therefore computed once and re-filtered per
// candidate threshold, which is equivalent to rebuilding the graph.
class Reclusterizer {
 public:
  Reclusterizer(std::vector<Point2> points, std::size_t k) : tree_(std::move(points)) {
    lists_.resize(tree_.size());
    for (std::size_t i = 0; i < tree_.size(); ++i) tree_.knn(i, k, lists_[i]);
  }

  ComponentLabeling components_at(double t) const {
    UnionFind uf(tree_.size());
    for (std::size_t u = 0; u < lists_.size(); ++u) {
      for (const Neighbor& n : lists_[u]) {
        if (n.distance <= t) uf.unite(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(n.index));
      }
    }
    return components_from_union_find(uf, tree_.size());
  }

 private:
  KdTree2 tree_;
  std::vector<std::vector<Neighbor>> lists_;
};

// Component member lists in label order (labels are first-appearance dense).
std::vector<std::vector<std::uint32_t>> group_by_label(const ComponentLabeling& comps) {
  std::vector<std::vector<std::uint32_t>> groups(comps.component_count);
  for (std::uint32_t i = 0; i < comps.labels.size(); ++i) {
    groups[comps.labels[i]].push_back(i);
  }
  return groups;
}

void split_recursive(std::span<const Point2> all_points, const SplitParams& params,
                     std::vector<std::uint32_t> subset, double t, int depth,
                     std::vector<SplitPiece>& out) {
  std::vector<Point2> pts;
  pts.reserve(subset.size());
  for (const std::uint32_t i : subset) pts.push_back(all_points[i]);

  const bool fits = fits_in_reference(pts, params);
  if (fits || depth >= kMaxDepth) {
    out.push_back({std::move(subset), fits});
    return;
  }

  t /= 2.0;
  double dt = t;
  const Reclusterizer rc(std::move(pts), params.k);

  for (;;) {
    dt /= 2.0;
    const ComponentLabeling comps = rc.components_at(t);
    const bool floor_reached = dt < params.epsilon;

    if (comps.component_count == 2 || (floor_reached && comps.component_count > 1)) {
      for (std::vector<std::uint32_t>& local : group_by_label(comps)) {
        std::vector<std::uint32_t> global;
        global.reserve(local.size());
        for (const std::uint32_t i : local) global.push_back(subset[i]);
        split_recursive(all_points, params, std::move(global), t, depth + 1, out);
      }
      return;
    }
    if (floor_reached) {
      // A single component that the dichotomy could not break apart.
      out.push_back({std::move(subset), false});
      return;
    }
    if (comps.component_count == 1) {
      t -= dt;
    } else {
      t += dt;
    }
  }
}

}  // namespace

bool fits_in_reference(std::span<const Point2> points, const SplitParams& params) {
  if (points.empty()) throw ContractViolation("fits_in_reference: empty input");
  const OrientedBox2D box = fit_min_area_box(points);
  const double long_side = std::max(params.ref_length, params.ref_width) * (1.0 + params.margin);
  const double short_side = std::min(params.ref_length, params.ref_width) * (1.0 + params.margin);
  return box.length() <= long_side && box.width() <= short_side;
}

std::vector<SplitPiece> split_cluster(std::span<const Point2> points, const SplitParams& params,
                                      double t) {
  if (points.empty()) throw ContractViolation("split_cluster: empty input");
  if (!(t > 0)) throw ContractViolation("split_cluster: threshold must be > 0");
  if (!(params.epsilon > 0)) throw ContractViolation("split_cluster: epsilon must be > 0");

  std::vector<std::uint32_t> all(points.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;

  std::vector<SplitPiece> out;
  split_recursive(points, params, std::move(all), t, 0, out);
  return out;
}

}  // namespace bevclust
