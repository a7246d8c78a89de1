#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bevclust/class_config.hpp"
#include "bevclust/geometry.hpp"
#include "bevclust/graph.hpp"

namespace bevclust {

/// N points in the sensor frame with per-point semantic class ids.
struct PointCloud {
  std::vector<std::array<float, 3>> xyz;
  std::vector<std::uint32_t> semantic;

  std::size_t size() const { return xyz.size(); }
};

/// Per-point instance ids paired with the (unchanged) semantic ids. Instance 0
/// marks stuff or unassigned points; thing instances are dense 1..M, globally
/// unique within one scan.
struct InstanceLabeling {
  std::vector<std::uint32_t> semantic;
  std::vector<std::uint32_t> instance;

  std::size_t size() const { return semantic.size(); }
};

/// BEV projection of one semantic class: (x, y) of exactly the points with the
/// requested class, in cloud order, plus their indices into the cloud.
struct BevProjection {
  std::vector<Point2> points;
  std::vector<std::uint32_t> cloud_indices;
};

/// Orthogonal projection onto the (x, y) plane restricted to class_id. Throws
/// ContractViolation for a class id absent from the table and FormatError for
/// non-finite coordinates on a selected point.
BevProjection project_bev(const PointCloud& cloud, std::uint32_t class_id,
                          const ClassConfig& config);

/// Admissible edge distance between two points of the class. Constant mode
/// returns t_c; range-proportional mode returns
/// coefficient * t_c * max(range_u, range_v), ranges being BEV distances from
/// the sensor origin.
double edge_threshold(const ClassConfig& config, const ClassInfo& cls, double range_u,
                      double range_v);
double edge_threshold(const ClassConfig& config, std::uint32_t class_id, double range_u,
                      double range_v);

/// Clusters already-projected points of one class: thresholded kNN graph plus
/// connected components.
ComponentLabeling cluster_points(std::span<const Point2> points, const ClassInfo& cls,
                                 const ClassConfig& config);

/// project_bev + cluster_points for one thing class. Component ids are aligned
/// with the class-restricted point order (see project_bev).
ComponentLabeling cluster_class(const PointCloud& cloud, std::uint32_t class_id,
                                const ClassConfig& config);

/// The full pipeline: every thing class is clustered independently, components
/// are optionally refined by box splitting, and instance ids are renumbered
/// globally 1..M in (class id, component first-appearance) order. Stuff points
/// keep instance 0.
InstanceLabeling cluster_scan(const PointCloud& cloud, const ClassConfig& config,
                              bool enable_split = true);

}  // namespace bevclust
