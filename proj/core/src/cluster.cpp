#include "bevclust/cluster.hpp"

#include <algorithm>
#include <cmath>

#include "bevclust/errors.hpp"
#include "bevclust/split.hpp"

namespace bevclust {

BevProjection project_bev(const PointCloud& cloud, std::uint32_t class_id,
                          const ClassConfig& config) {
  config.at(class_id);  // unknown class -> ContractViolation
  if (cloud.semantic.size() != cloud.xyz.size()) {
    throw ContractViolation("project_bev: semantic/xyz size mismatch");
  }
  BevProjection out;
  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    if (cloud.semantic[i] != class_id) continue;
    const auto& p = cloud.xyz[i];
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw FormatError("project_bev: non-finite coordinate at point " + std::to_string(i));
    }
    out.points.push_back({static_cast<double>(p[0]), static_cast<double>(p[1])});
    out.cloud_indices.push_back(i);
  }
  return out;
}

double edge_threshold(const ClassConfig& config, const ClassInfo& cls, double range_u,
                      double range_v) {
  const double t = cls.threshold();
  if (config.threshold_mode == ThresholdMode::kConstant) return t;
  return config.range_coefficient * t * std::max(range_u, range_v);
}

double edge_threshold(const ClassConfig& config, std::uint32_t class_id, double range_u,
                      double range_v) {
  return edge_threshold(config, config.at(class_id), range_u, range_v);
}

ComponentLabeling cluster_points(std::span<const Point2> points, const ClassInfo& cls,
                                 const ClassConfig& config) {
  if (points.empty()) return {};
  if (points.size() == 1) return {{0u}, 1u};

  KdTree2 tree(std::vector<Point2>(points.begin(), points.end()));
  AdjacencyGraph graph;
  if (config.threshold_mode == ThresholdMode::kConstant) {
    const double t = cls.threshold();
    graph = build_threshold_graph(tree, config.k, [t](std::size_t, std::size_t) { return t; });
  } else {
    std::vector<double> range(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      range[i] = std::hypot(points[i].x, points[i].y);
    }
    graph = build_threshold_graph(tree, config.k, [&](std::size_t u, std::size_t v) {
      return edge_threshold(config, cls, range[u], range[v]);
    });
  }
  return connected_components(graph);
}

ComponentLabeling cluster_class(const PointCloud& cloud, std::uint32_t class_id,
                                const ClassConfig& config) {
  const ClassInfo& cls = config.at(class_id);
  if (!cls.thing) {
    throw ContractViolation("cluster_class: class " + std::to_string(class_id) +
                            " is not a thing class");
  }
  const BevProjection proj = project_bev(cloud, class_id, config);
  return cluster_points(proj.points, cls, config);
}

InstanceLabeling cluster_scan(const PointCloud& cloud, const ClassConfig& config,
                              bool enable_split) {
  if (cloud.semantic.size() != cloud.xyz.size()) {
    throw ContractViolation("cluster_scan: semantic/xyz size mismatch");
  }
  InstanceLabeling out;
  out.semantic = cloud.semantic;
  out.instance.assign(cloud.size(), 0);

  std::uint32_t next_id = 1;
  for (const ClassInfo* cls : config.thing_classes()) {
    const BevProjection proj = project_bev(cloud, cls->id, config);
    if (proj.points.empty()) continue;
    const ComponentLabeling comps = cluster_points(proj.points, *cls, config);

    std::vector<std::vector<std::uint32_t>> groups(comps.component_count);
    for (std::uint32_t i = 0; i < comps.labels.size(); ++i) {
      groups[comps.labels[i]].push_back(i);
    }

    for (const std::vector<std::uint32_t>& group : groups) {
      if (!enable_split) {
        for (const std::uint32_t i : group) out.instance[proj.cloud_indices[i]] = next_id;
        ++next_id;
        continue;
      }
      std::vector<Point2> pts;
      pts.reserve(group.size());
      for (const std::uint32_t i : group) pts.push_back(proj.points[i]);

      const SplitParams params{cls->length, cls->width, config.margin, config.epsilon, config.k};
      for (const SplitPiece& piece : split_cluster(pts, params, cls->threshold())) {
        for (const std::uint32_t local : piece.indices) {
          out.instance[proj.cloud_indices[group[local]]] = next_id;
        }
        ++next_id;
      }
    }
  }
  return out;
}

}  // namespace bevclust
