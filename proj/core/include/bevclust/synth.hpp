#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bevclust/class_config.hpp"
#include "bevclust/cluster.hpp"
#include "bevclust/geometry.hpp"

namespace bevclust::synth {

/// splitmix64 with explicit float mapping, so a seed gives the same stream on
/// every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

 private:
  std::uint64_t state_;
};

/// One box-footprint object to be filled with points.
struct BlobSpec {
  std::uint32_t class_id = 0;
  Point2 center;
  double length = 1.0;  // footprint, meters
  double width = 1.0;
  double yaw = 0.0;
  double spacing = 0.1;  // grid step between points
  double jitter = 0.3;   // per-point displacement, fraction of spacing
  double height = 1.5;   // z extent
};

/// Appends a grid-plus-jitter blob, clamped inside its footprint so that the
/// blob always fits the (length, width) box. Returns the number of points
/// added. Every added point gets the given semantic class and instance id.
std::size_t add_blob(PointCloud& cloud, std::vector<std::uint32_t>& gt_instance,
                     const BlobSpec& spec, std::uint32_t instance_id, Rng& rng);

struct SceneParams {
  std::uint64_t seed = 1;
  std::size_t target_points = 120000;
  double field_radius = 48.0;      // object placement radius, meters
  std::size_t object_count = 40;   // thing objects
  double min_clearance = 2.5;      // gap between object footprints, meters
  double stuff_fraction = 0.8;     // share of points on ground rings
  bool density_falloff = true;     // point spacing grows with sensor range
  double base_spacing = 0.06;      // blob grid step at range 0
  double spacing_per_meter = 0.004;
};

struct Scene {
  PointCloud cloud;
  std::vector<std::uint32_t> gt_instance;  // dense 1..M on thing points, else 0
  std::size_t object_count = 0;
};

/// A LiDAR-like synthetic scan: concentric ground rings of stuff classes (ring
/// spacing grows with range when density_falloff is set) plus thing-class
/// blobs sized by their reference boxes, placed with the requested clearance.
Scene generate_scene(const SceneParams& params, const ClassConfig& config);

/// A row of `gaps.size() + 1` reference-box-sized blobs of one class along the
/// x axis (then rotated by yaw around origin), bumper to bumper with the given
/// gaps. blob_of_point records which blob each point belongs to.
struct MergedRow {
  std::vector<Point2> points;
  std::vector<std::uint32_t> blob_of_point;
};

MergedRow merged_row(const ClassInfo& cls, std::span<const double> gaps, double spacing,
                     double jitter, double yaw, Point2 origin, Rng& rng);

}  // namespace bevclust::synth
