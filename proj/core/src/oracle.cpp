#include "bevclust/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>

#include "bevclust/errors.hpp"

namespace bevclust::oracle {

std::vector<Neighbor> knn_linear_scan(std::span<const Point2> points, std::size_t query_index,
                                      std::size_t k) {
  if (points.empty()) return {};
  if (query_index >= points.size()) {
    throw ContractViolation("knn_linear_scan: query index out of range");
  }
  if (k == 0) throw ContractViolation("knn_linear_scan: k must be >= 1");

  std::vector<Neighbor> all;
  all.reserve(points.size() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == query_index) continue;
    all.push_back({i, squared_distance(points[query_index], points[i])});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  if (all.size() > k) all.resize(k);
  for (Neighbor& n : all) n.distance = std::sqrt(n.distance);
  return all;
}

std::vector<Point2> convex_hull_bruteforce(std::span<const Point2> points) {
  if (points.empty()) throw ContractViolation("convex_hull_bruteforce: empty input");

  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() <= 2) return pts;

  // Directed CCW hull edges: all other points strictly to the left.
  std::map<std::size_t, std::size_t> next;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      bool all_left = true;
      for (std::size_t c = 0; c < pts.size(); ++c) {
        if (c == i || c == j) continue;
        if (cross(pts[i], pts[j], pts[c]) <= 0) {
          all_left = false;
          break;
        }
      }
      if (all_left) next[i] = j;
    }
  }
  if (next.empty()) throw ContractViolation("convex_hull_bruteforce: degenerate input");

  std::vector<Point2> hull;
  const std::size_t start = next.begin()->first;
  std::size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    const auto it = next.find(cur);
    if (it == next.end() || hull.size() > pts.size()) {
      throw ContractViolation("convex_hull_bruteforce: broken edge chain (collinear input?)");
    }
    cur = it->second;
  } while (cur != start);

  // Rotate so the lexicographically smallest vertex comes first.
  const auto smallest =
      std::min_element(hull.begin(), hull.end(), [](const Point2& a, const Point2& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
      });
  std::rotate(hull.begin(), smallest, hull.end());
  return hull;
}

ComponentLabeling bfs_components(const AdjacencyGraph& graph) {
  std::vector<std::vector<std::uint32_t>> adj(graph.node_count);
  for (const auto& [u, v] : graph.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  ComponentLabeling out;
  constexpr std::uint32_t kUnset = 0xffffffffu;
  out.labels.assign(graph.node_count, kUnset);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < graph.node_count; ++i) {
    if (out.labels[i] != kUnset) continue;
    const std::uint32_t label = out.component_count++;
    queue.assign(1, i);
    out.labels[i] = label;
    while (!queue.empty()) {
      const std::uint32_t u = queue.back();
      queue.pop_back();
      for (const std::uint32_t v : adj[u]) {
        if (out.labels[v] == kUnset) {
          out.labels[v] = label;
          queue.push_back(v);
        }
      }
    }
  }
  return out;
}

ComponentLabeling radius_cluster_bruteforce(std::span<const Point2> points, double t) {
  if (points.size() > 5000) {
    throw ContractViolation("radius_cluster_bruteforce: refused, more than 5000 points");
  }
  UnionFind uf(points.size());
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    for (std::uint32_t j = i + 1; j < points.size(); ++j) {
      if (distance(points[i], points[j]) <= t) uf.unite(i, j);
    }
  }
  return components_from_union_find(uf, points.size());
}

OrientedBox2D min_box_sweep(std::span<const Point2> points, double angle_step) {
  if (points.empty()) throw ContractViolation("min_box_sweep: empty input");
  if (!(angle_step > 0)) throw ContractViolation("min_box_sweep: step must be > 0");

  constexpr double kHalfPi = 1.5707963267948966;
  double best_area = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  double best_xmin = 0, best_xmax = 0, best_ymin = 0, best_ymax = 0;

  for (double theta = 0.0; theta < kHalfPi; theta += angle_step) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Point2& p : points) {
      const double rx = c * p.x + s * p.y;
      const double ry = -s * p.x + c * p.y;
      xmin = std::min(xmin, rx);
      xmax = std::max(xmax, rx);
      ymin = std::min(ymin, ry);
      ymax = std::max(ymax, ry);
    }
    const double area = (xmax - xmin) * (ymax - ymin);
    if (area < best_area) {
      best_area = area;
      best_theta = theta;
      best_xmin = xmin;
      best_xmax = xmax;
      best_ymin = ymin;
      best_ymax = ymax;
    }
  }

  const double c = std::cos(best_theta);
  const double s = std::sin(best_theta);
  const double cx = 0.5 * (best_xmin + best_xmax);
  const double cy = 0.5 * (best_ymin + best_ymax);
  const double ex = 0.5 * (best_xmax - best_xmin);
  const double ey = 0.5 * (best_ymax - best_ymin);

  OrientedBox2D box;
  box.center = {c * cx - s * cy, s * cx + c * cy};
  if (ex >= ey) {
    box.half_length = ex;
    box.half_width = ey;
    box.yaw = normalize_yaw(best_theta);
  } else {
    box.half_length = ey;
    box.half_width = ex;
    box.yaw = normalize_yaw(best_theta + kHalfPi);
  }
  return box;
}

std::vector<SegmentMatch> match_exhaustive(const InstanceLabeling& pred,
                                           const InstanceLabeling& gt, std::uint32_t class_id,
                                           const ClassConfig& config) {
  if (pred.size() != gt.size()) {
    throw ContractViolation("match_exhaustive: label array length mismatch");
  }

  std::map<std::uint32_t, std::uint64_t> pred_size, gt_size;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> inter;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (config.is_void(gt.semantic[i])) continue;
    const bool in_pred = pred.semantic[i] == class_id;
    const bool in_gt = gt.semantic[i] == class_id;
    if (in_pred) ++pred_size[pred.instance[i]];
    if (in_gt) ++gt_size[gt.instance[i]];
    if (in_pred && in_gt) ++inter[{pred.instance[i], gt.instance[i]}];
  }
  if (pred_size.size() > 10 || gt_size.size() > 10) {
    throw ContractViolation("match_exhaustive: refused, more than 10 segments per side");
  }

  struct Candidate {
    std::uint32_t pi, gi;
    std::uint64_t overlap, uni;
    double iou;
  };
  std::vector<Candidate> candidates;
  for (const auto& [key, overlap] : inter) {
    const std::uint64_t uni = pred_size[key.first] + gt_size[key.second] - overlap;
    const double iou = static_cast<double>(overlap) / static_cast<double>(uni);
    if (iou > 0.5) candidates.push_back({key.first, key.second, overlap, uni, iou});
  }

  // Enumerate all subsets of candidate pairs that form a matching and keep the
  // largest (ties by higher IoU sum, then lexicographic order for
  // determinism).
  std::vector<std::size_t> best, current;
  double best_iou = -1.0;
  std::function<void(std::size_t)> recurse = [&](std::size_t idx) {
    if (idx == candidates.size()) {
      double iou_sum = 0;
      for (const std::size_t c : current) iou_sum += candidates[c].iou;
      if (current.size() > best.size() ||
          (current.size() == best.size() && iou_sum > best_iou)) {
        best = current;
        best_iou = iou_sum;
      }
      return;
    }
    bool usable = true;
    for (const std::size_t c : current) {
      if (candidates[c].pi == candidates[idx].pi || candidates[c].gi == candidates[idx].gi) {
        usable = false;
        break;
      }
    }
    if (usable) {
      current.push_back(idx);
      recurse(idx + 1);
      current.pop_back();
    }
    recurse(idx + 1);
  };
  recurse(0);

  std::vector<SegmentMatch> out;
  for (const std::size_t c : best) {
    out.push_back({class_id, candidates[c].pi, candidates[c].gi, candidates[c].overlap,
                   candidates[c].uni, candidates[c].iou});
  }
  std::sort(out.begin(), out.end(),
            [](const SegmentMatch& a, const SegmentMatch& b) { return a.gt_instance < b.gt_instance; });
  return out;
}

}  // namespace bevclust::oracle
