#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bevclust {

/// A point in the bird's-eye-view plane, meters.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double squared_distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Point2& a, const Point2& b) {
  return std::sqrt(squared_distance(a, b));
}

/// Cross product of (a - o) and (b - o). Positive when o->a->b turns left.
inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

struct Neighbor {
  std::size_t index = 0;    // original position in the input sequence
  double distance = 0.0;    // meters
};

/// Static 2-d tree over an immutable point set. Construction is deterministic
/// for a given input order; queries report neighbors by original index.
class KdTree2 {
 public:
  KdTree2() = default;

  /// Throws ContractViolation if any coordinate is NaN or infinite.
  explicit KdTree2(std::vector<Point2> points);

  std::size_t size() const { return points_.size(); }
  const Point2& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point2>& points() const { return points_; }

  /// The k points nearest to points()[query_index], excluding the query point
  /// itself, sorted by ascending distance with ties broken by lower original
  /// index. Returns min(k, size() - 1) entries. Coincident points are reported
  /// as distance-0 neighbors.
  std::vector<Neighbor> knn(std::size_t query_index, std::size_t k) const;

  /// Same as above, reusing the caller's buffer.
  void knn(std::size_t query_index, std::size_t k, std::vector<Neighbor>& out) const;

 private:
  struct Node {  // a point stored at its tree position
    Point2 p;
    std::uint32_t id;
  };

  void search(std::size_t lo, std::size_t hi, unsigned depth, const Point2& q,
              std::uint32_t query_id, std::size_t k, std::vector<Neighbor>& heap) const;

  std::vector<Point2> points_;
  std::vector<Node> nodes_;  // median-partitioned layout
};

/// Convex hull vertices in counter-clockwise order, starting at the
/// lexicographically smallest vertex. Collinear interior vertices are removed.
/// Inputs with fewer than 3 distinct, non-collinear points yield a degenerate
/// hull (a single point or a segment).
struct ConvexHull {
  std::vector<Point2> vertices;
  bool degenerate = false;
};

/// Monotone-chain hull over the deduplicated input. Throws ContractViolation
/// on an empty or non-finite input.
ConvexHull convex_hull(std::span<const Point2> points);

/// True when p lies inside or on the hull, within a perpendicular-distance
/// tolerance in meters.
bool hull_contains(const ConvexHull& hull, const Point2& p, double tol = 1e-9);

/// A rotated rectangle in the BEV plane. half_length >= half_width >= 0 and
/// yaw, the direction of the long side, is normalized to [0, pi).
struct OrientedBox2D {
  Point2 center;
  double half_length = 0.0;
  double half_width = 0.0;
  double yaw = 0.0;

  double area() const { return 4.0 * half_length * half_width; }
  double length() const { return 2.0 * half_length; }
  double width() const { return 2.0 * half_width; }
  bool contains(const Point2& p, double tol = 1e-9) const;
};

/// Normalize an angle to [0, pi). Rectangles are pi-periodic.
double normalize_yaw(double angle);

/// Minimum-area enclosing rectangle of the point set. For each convex-hull
/// edge the cloud is rotated so the edge aligns with the x axis, the
/// axis-aligned bounding box is measured, and the smallest-area candidate is
/// rotated back. A single point yields a zero-extent box; collinear points a
/// zero-width box along the segment. Throws ContractViolation on empty input.
OrientedBox2D fit_min_area_box(std::span<const Point2> points);

}  // namespace bevclust
