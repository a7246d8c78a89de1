#include "bevclust/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bevclust/errors.hpp"

namespace bevclust {

namespace {

// Tolerance for treating three points as collinear in hull construction.
constexpr double kCrossEps = 1e-12;

// Max-heap order on (distance^2, index): the worst candidate sits on top.
struct HeapLess {
  bool operator()(const Neighbor& a, const Neighbor& b) const {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  }
};

}  // namespace

KdTree2::KdTree2(std::vector<Point2> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!finite(points_[i])) {
      throw ContractViolation("KdTree2: non-finite coordinate at point " + std::to_string(i));
    }
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);

  // Iterative median partitioning over [lo, hi) ranges; axis alternates with
  // depth. nth_element ties are broken by original index so the layout is a
  // pure function of the input order.
  struct Range {
    std::size_t lo, hi;
    unsigned depth;
  };
  std::vector<Range> stack;
  if (!order_.empty()) stack.push_back({0, order_.size(), 0});
  while (!stack.empty()) {
    const Range r = stack.back();
    stack.pop_back();
    if (r.hi - r.lo <= 1) continue;
    const std::size_t mid = r.lo + (r.hi - r.lo) / 2;
    const bool on_x = (r.depth & 1u) == 0;
    std::nth_element(order_.begin() + r.lo, order_.begin() + mid, order_.begin() + r.hi,
                     [&](std::uint32_t a, std::uint32_t b) {
                       const double ca = on_x ? points_[a].x : points_[a].y;
                       const double cb = on_x ? points_[b].x : points_[b].y;
                       if (ca != cb) return ca < cb;
                       return a < b;
                     });
    stack.push_back({r.lo, mid, r.depth + 1});
    stack.push_back({mid + 1, r.hi, r.depth + 1});
  }
}

void KdTree2::search(std::size_t lo, std::size_t hi, unsigned depth, std::size_t query,
                     std::size_t k, std::vector<Neighbor>& heap) const {
  if (lo >= hi) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  const std::uint32_t id = order_[mid];
  const Point2& q = points_[query];

  if (id != query) {
    const double d2 = squared_distance(q, points_[id]);
    if (heap.size() < k) {
      heap.push_back({id, d2});
      std::push_heap(heap.begin(), heap.end(), HeapLess{});
    } else {
      const Neighbor& worst = heap.front();
      if (d2 < worst.distance || (d2 == worst.distance && id < worst.index)) {
        std::pop_heap(heap.begin(), heap.end(), HeapLess{});
        heap.back() = {id, d2};
        std::push_heap(heap.begin(), heap.end(), HeapLess{});
      }
    }
  }

  const bool on_x = (depth & 1u) == 0;
  const double delta = on_x ? q.x - points_[id].x : q.y - points_[id].y;
  const std::size_t near_lo = delta < 0 ? lo : mid + 1;
  const std::size_t near_hi = delta < 0 ? mid : hi;
  const std::size_t far_lo = delta < 0 ? mid + 1 : lo;
  const std::size_t far_hi = delta < 0 ? hi : mid;

  search(near_lo, near_hi, depth + 1, query, k, heap);
  // The far side may still hold an equal-distance neighbor with a lower index,
  // so it is pruned only on a strictly larger plane distance.
  if (heap.size() < k || delta * delta <= heap.front().distance) {
    search(far_lo, far_hi, depth + 1, query, k, heap);
  }
}

void KdTree2::knn(std::size_t query_index, std::size_t k, std::vector<Neighbor>& out) const {
  out.clear();
  if (points_.empty()) return;
  if (query_index >= points_.size()) {
    throw ContractViolation("KdTree2::knn: query index " + std::to_string(query_index) +
                            " out of range (size " + std::to_string(points_.size()) + ")");
  }
  if (k == 0) throw ContractViolation("KdTree2::knn: k must be >= 1");

  search(0, points_.size(), 0, query_index, k, out);
  std::sort(out.begin(), out.end(), HeapLess{});
  for (Neighbor& n : out) n.distance = std::sqrt(n.distance);
}

std::vector<Neighbor> KdTree2::knn(std::size_t query_index, std::size_t k) const {
  std::vector<Neighbor> out;
  knn(query_index, k, out);
  return out;
}

ConvexHull convex_hull(std::span<const Point2> points) {
  if (points.empty()) throw ContractViolation("convex_hull: empty input");

  std::vector<Point2> pts(points.begin(), points.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!finite(pts[i])) {
      throw ContractViolation("convex_hull: non-finite coordinate at point " + std::to_string(i));
    }
  }
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());

  ConvexHull hull;
  if (pts.size() == 1) {
    hull.vertices = {pts[0]};
    hull.degenerate = true;
    return hull;
  }
  if (pts.size() == 2) {
    hull.vertices = {pts[0], pts[1]};
    hull.degenerate = true;
    return hull;
  }

  std::vector<Point2> chain(2 * pts.size());
  std::size_t m = 0;
  for (const Point2& p : pts) {  // lower hull
    while (m >= 2 && cross(chain[m - 2], chain[m - 1], p) <= kCrossEps) --m;
    chain[m++] = p;
  }
  const std::size_t lower_end = m + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {  // upper hull
    const Point2& p = pts[i];
    while (m >= lower_end && cross(chain[m - 2], chain[m - 1], p) <= kCrossEps) --m;
    chain[m++] = p;
  }
  chain.resize(m - 1);  // last point repeats the first

  hull.vertices = std::move(chain);
  hull.degenerate = hull.vertices.size() < 3;
  return hull;
}

bool hull_contains(const ConvexHull& hull, const Point2& p, double tol) {
  const auto& v = hull.vertices;
  if (v.empty()) return false;
  if (v.size() == 1) return distance(v[0], p) <= tol;

  auto beyond_edge = [&](const Point2& a, const Point2& b) {
    const double len = distance(a, b);
    if (len == 0.0) return distance(a, p) > tol;
    return cross(a, b, p) / len < -tol;  // signed distance to the CCW edge
  };

  if (v.size() == 2) {
    // Degenerate segment: within tol of the segment.
    const double len = distance(v[0], v[1]);
    const double t = ((p.x - v[0].x) * (v[1].x - v[0].x) + (p.y - v[0].y) * (v[1].y - v[0].y)) /
                     (len * len);
    const double tc = std::clamp(t, 0.0, 1.0);
    const Point2 proj{v[0].x + tc * (v[1].x - v[0].x), v[0].y + tc * (v[1].y - v[0].y)};
    return distance(proj, p) <= tol;
  }

  for (std::size_t i = 0; i < v.size(); ++i) {
    if (beyond_edge(v[i], v[(i + 1) % v.size()])) return false;
  }
  return true;
}

double normalize_yaw(double angle) {
  constexpr double kPi = 3.14159265358979323846;
  double a = std::fmod(angle, kPi);
  if (a < 0) a += kPi;
  if (a >= kPi) a -= kPi;
  return a;
}

bool OrientedBox2D::contains(const Point2& p, double tol) const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  const double u = c * dx + s * dy;   // along the long side
  const double v = -s * dx + c * dy;  // along the short side
  return std::abs(u) <= half_length + tol && std::abs(v) <= half_width + tol;
}

OrientedBox2D fit_min_area_box(std::span<const Point2> points) {
  if (points.empty()) throw ContractViolation("fit_min_area_box: empty input");

  const ConvexHull hull = convex_hull(points);
  const auto& v = hull.vertices;

  if (v.size() == 1) {
    OrientedBox2D box;
    box.center = v[0];
    return box;
  }

  double best_area = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  double best_xmin = 0, best_xmax = 0, best_ymin = 0, best_ymax = 0;

  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    const double theta = std::atan2(b.y - a.y, b.x - a.x);
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Point2& p : points) {  // rotate by -theta, take the AABB
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
    box.yaw = normalize_yaw(best_theta + 1.5707963267948966);
  }
  return box;
}

}  // namespace bevclust
