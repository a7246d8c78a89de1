#include "bevclust/synth.hpp"

#include <algorithm>
#include <cmath>

#include "bevclust/errors.hpp"

namespace bevclust::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Placement {
  const ClassInfo* cls;
  Point2 center;
  double yaw;
  double radius;  // footprint circumradius
};

}  // namespace

std::size_t add_blob(PointCloud& cloud, std::vector<std::uint32_t>& gt_instance,
                     const BlobSpec& spec, std::uint32_t instance_id, Rng& rng) {
  const double c = std::cos(spec.yaw);
  const double s = std::sin(spec.yaw);
  const double hl = spec.length / 2.0;
  const double hw = spec.width / 2.0;
  const auto nx = static_cast<std::size_t>(std::max(1.0, std::floor(spec.length / spec.spacing))) + 1;
  const auto ny = static_cast<std::size_t>(std::max(1.0, std::floor(spec.width / spec.spacing))) + 1;

  std::size_t added = 0;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double gx = nx > 1 ? -hl + spec.length * static_cast<double>(ix) / (nx - 1) : 0.0;
      const double gy = ny > 1 ? -hw + spec.width * static_cast<double>(iy) / (ny - 1) : 0.0;
      const double amp = spec.jitter * spec.spacing;
      const double lx = std::clamp(gx + rng.uniform(-amp, amp), -hl, hl);
      const double ly = std::clamp(gy + rng.uniform(-amp, amp), -hw, hw);
      const double wx = spec.center.x + c * lx - s * ly;
      const double wy = spec.center.y + s * lx + c * ly;
      const double wz = rng.uniform(0.0, spec.height);
      cloud.xyz.push_back({static_cast<float>(wx), static_cast<float>(wy), static_cast<float>(wz)});
      cloud.semantic.push_back(spec.class_id);
      gt_instance.push_back(instance_id);
      ++added;
    }
  }
  return added;
}

Scene generate_scene(const SceneParams& params, const ClassConfig& config) {
  Rng rng(params.seed);
  Scene scene;

  const std::vector<const ClassInfo*> things = config.thing_classes();
  const std::vector<const ClassInfo*> stuffs = config.stuff_classes();

  // Ground rings. A fixed angular step per ring makes the arc spacing grow
  // linearly with range, mimicking a spinning-beam scan pattern.
  const auto stuff_budget =
      static_cast<double>(params.target_points) * (stuffs.empty() ? 0.0 : params.stuff_fraction);
  if (!stuffs.empty() && stuff_budget >= 1.0) {
    const double r0 = 2.0;
    const double dr = 0.35;
    const std::size_t rings = static_cast<std::size_t>((params.field_radius - r0) / dr) + 1;
    // Pick the angular step so the ring points sum to roughly the budget.
    double weight = 0.0;
    for (std::size_t j = 0; j < rings; ++j) {
      const double r = r0 + dr * static_cast<double>(j);
      weight += params.density_falloff ? 1.0 : r;
    }
    for (std::size_t j = 0; j < rings; ++j) {
      const double r = r0 + dr * static_cast<double>(j);
      const double share = (params.density_falloff ? 1.0 : r) / weight;
      const auto count = static_cast<std::size_t>(stuff_budget * share);
      if (count == 0) continue;
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      for (std::size_t i = 0; i < count; ++i) {
        const double a = phase + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
        const double rr = r + rng.uniform(-0.05, 0.05);
        const double x = rr * std::cos(a);
        const double y = rr * std::sin(a);
        // Stuff class by radial band first, then by angular sector.
        std::size_t band = 0;
        if (r < 8.0) {
          band = 0;
        } else if (r < 13.0) {
          band = std::min<std::size_t>(1, stuffs.size() - 1);
        } else {
          const auto sector = static_cast<std::size_t>((a / (2.0 * kPi)) * 12.0);
          band = stuffs.size() > 2 ? 2 + ((sector * 7 + j) % (stuffs.size() - 2)) : stuffs.size() - 1;
        }
        scene.cloud.xyz.push_back({static_cast<float>(x), static_cast<float>(y),
                                   static_cast<float>(rng.uniform(-0.1, 0.1))});
        scene.cloud.semantic.push_back(stuffs[band]->id);
        scene.gt_instance.push_back(0);
      }
    }
  }

  if (things.empty() || params.object_count == 0) return scene;

  // Place objects with pairwise clearance between footprint circles.
  std::vector<Placement> placements;
  for (std::size_t n = 0; n < params.object_count; ++n) {
    const ClassInfo* cls = things[rng.index(things.size())];
    const double radius = 0.5 * std::hypot(cls->length, cls->width);
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      const double rr = params.field_radius * std::sqrt(rng.uniform01());
      const double a = rng.uniform(0.0, 2.0 * kPi);
      const Point2 center{std::max(4.0, rr) * std::cos(a), std::max(4.0, rr) * std::sin(a)};
      bool ok = true;
      for (const Placement& p : placements) {
        if (distance(p.center, center) < p.radius + radius + params.min_clearance) {
          ok = false;
          break;
        }
      }
      if (ok) {
        placements.push_back({cls, center, rng.uniform(0.0, kPi), radius});
        placed = true;
      }
    }
  }

  // Scale the grid step so the thing points land near the remaining budget.
  const double thing_budget =
      std::max(1.0, static_cast<double>(params.target_points) * (1.0 - params.stuff_fraction));
  const auto spacing_at = [&](double range, double scale) {
    const double growth = params.density_falloff ? 1.0 + params.spacing_per_meter * range : 1.0;
    return params.base_spacing * growth * scale;
  };
  double expected = 0.0;
  for (const Placement& p : placements) {
    const double s = spacing_at(std::hypot(p.center.x, p.center.y), 1.0);
    expected += (p.cls->length / s + 1.0) * (p.cls->width / s + 1.0);
  }
  const double scale = expected > thing_budget ? std::sqrt(expected / thing_budget) : 1.0;

  std::uint32_t next_instance = 1;
  for (const Placement& p : placements) {
    BlobSpec spec;
    spec.class_id = p.cls->id;
    spec.center = p.center;
    spec.length = p.cls->length;
    spec.width = p.cls->width;
    spec.yaw = p.yaw;
    spec.spacing = spacing_at(std::hypot(p.center.x, p.center.y), scale);
    add_blob(scene.cloud, scene.gt_instance, spec, next_instance, rng);
    ++next_instance;
  }
  scene.object_count = placements.size();
  return scene;
}

MergedRow merged_row(const ClassInfo& cls, std::span<const double> gaps, double spacing,
                     double jitter, double yaw, Point2 origin, Rng& rng) {
  if (!(spacing > 0)) throw ContractViolation("merged_row: spacing must be > 0");

  MergedRow row;
  PointCloud cloud;
  std::vector<std::uint32_t> instances;

  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  double cursor = 0.0;  // running x offset of the current blob's near edge
  for (std::size_t b = 0; b <= gaps.size(); ++b) {
    BlobSpec spec;
    spec.class_id = cls.id;
    spec.length = cls.length;
    spec.width = cls.width;
    spec.yaw = 0.0;
    spec.spacing = spacing;
    spec.jitter = jitter;
    spec.center = {cursor + cls.length / 2.0, 0.0};
    add_blob(cloud, instances, spec, static_cast<std::uint32_t>(b), rng);
    cursor += cls.length;
    if (b < gaps.size()) cursor += gaps[b];
  }

  row.points.reserve(cloud.size());
  row.blob_of_point.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double lx = cloud.xyz[i][0];
    const double ly = cloud.xyz[i][1];
    row.points.push_back({origin.x + c * lx - s * ly, origin.y + s * lx + c * ly});
    row.blob_of_point.push_back(instances[i]);
  }
  return row;
}

}  // namespace bevclust::synth
