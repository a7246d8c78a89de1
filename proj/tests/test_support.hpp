#pragma once

#include <vector>

#include "bevclust/class_config.hpp"
#include "bevclust/cluster.hpp"

namespace bevclust::testsupport {

inline ClassInfo thing(std::uint32_t id, const char* name, double length, double width) {
  ClassInfo c;
  c.id = id;
  c.name = name;
  c.thing = true;
  c.length = std::max(length, width);
  c.width = std::min(length, width);
  return c;
}

inline ClassInfo stuff(std::uint32_t id, const char* name) {
  ClassInfo c;
  c.id = id;
  c.name = name;
  c.thing = false;
  return c;
}

/// car(10) 4.4x1.8, truck(18) 10x3, person(30) 0.8x0.8 + road(40), building(50).
inline ClassConfig small_config() {
  ClassConfig cfg;
  cfg.classes = {thing(10, "car", 4.4, 1.8), thing(18, "truck", 10.0, 3.0),
                 thing(30, "person", 0.8, 0.8), stuff(40, "road"), stuff(50, "building")};
  return cfg;
}

inline PointCloud cloud_from_bev(const std::vector<Point2>& pts, std::uint32_t class_id,
                                 float z = 0.0f) {
  PointCloud cloud;
  for (const Point2& p : pts) {
    cloud.xyz.push_back({static_cast<float>(p.x), static_cast<float>(p.y), z});
    cloud.semantic.push_back(class_id);
  }
  return cloud;
}

inline void append_points(PointCloud& cloud, const std::vector<Point2>& pts,
                          std::uint32_t class_id, float z = 0.0f) {
  for (const Point2& p : pts) {
    cloud.xyz.push_back({static_cast<float>(p.x), static_cast<float>(p.y), z});
    cloud.semantic.push_back(class_id);
  }
}

}  // namespace bevclust::testsupport
