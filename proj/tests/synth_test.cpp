#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "bevclust/geometry.hpp"
#include "bevclust/split.hpp"
#include "bevclust/synth.hpp"
#include "test_support.hpp"

using namespace bevclust;
using namespace bevclust::testsupport;

TEST_CASE("rng: deterministic stream") {
  synth::Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  synth::Rng c(124);
  CHECK(a.next_u64() != c.next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform(2.0, 3.0);
    CHECK(u >= 2.0);
    CHECK(u < 3.0);
  }
}

TEST_CASE("add_blob: points stay inside the footprint") {
  PointCloud cloud;
  std::vector<std::uint32_t> inst;
  synth::Rng rng(5);
  synth::BlobSpec spec;
  spec.class_id = 10;
  spec.center = {10, -4};
  spec.length = 4.4;
  spec.width = 1.8;
  spec.yaw = 0.6;
  spec.spacing = 0.15;
  const std::size_t added = synth::add_blob(cloud, inst, spec, 3, rng);
  CHECK(added == cloud.size());
  CHECK(added > 100);

  std::vector<Point2> bev;
  for (const auto& p : cloud.xyz) bev.push_back({p[0], p[1]});
  const OrientedBox2D box = fit_min_area_box(bev);
  CHECK(box.length() <= 4.4 + 1e-6);
  CHECK(box.width() <= 1.8 + 1e-6);
  CHECK(std::all_of(inst.begin(), inst.end(), [](std::uint32_t i) { return i == 3; }));
}

TEST_CASE("generate_scene: deterministic, sized, labeled") {
  const ClassConfig cfg = small_config();
  synth::SceneParams params;
  params.seed = 9;
  params.target_points = 20000;
  params.object_count = 12;
  params.field_radius = 35;

  const synth::Scene a = synth::generate_scene(params, cfg);
  const synth::Scene b = synth::generate_scene(params, cfg);
  CHECK(a.cloud.xyz == b.cloud.xyz);
  CHECK(a.cloud.semantic == b.cloud.semantic);
  CHECK(a.gt_instance == b.gt_instance);

  // Point budget is approximate but close.
  CHECK(a.cloud.size() > params.target_points * 0.8);
  CHECK(a.cloud.size() < params.target_points * 1.25);

  // Instance ids are dense 1..M on thing points, 0 on stuff.
  std::set<std::uint32_t> ids;
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    const ClassInfo& cls = cfg.at(a.cloud.semantic[i]);
    if (cls.thing) {
      CHECK(a.gt_instance[i] > 0);
      ids.insert(a.gt_instance[i]);
    } else {
      CHECK(a.gt_instance[i] == 0);
    }
  }
  CHECK(ids.size() == a.object_count);
  if (!ids.empty()) {
    CHECK(*ids.begin() == 1);
    CHECK(*ids.rbegin() == a.object_count);
  }
}

TEST_CASE("generate_scene: clearance keeps each object inside its own box") {
  const ClassConfig cfg = small_config();
  synth::SceneParams params;
  params.seed = 31;
  params.target_points = 15000;
  params.object_count = 10;
  params.min_clearance = 3.5;

  const synth::Scene scene = synth::generate_scene(params, cfg);
  std::map<std::uint32_t, std::vector<Point2>> objects;
  std::map<std::uint32_t, std::uint32_t> object_class;
  for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
    if (scene.gt_instance[i] == 0) continue;
    objects[scene.gt_instance[i]].push_back({scene.cloud.xyz[i][0], scene.cloud.xyz[i][1]});
    object_class[scene.gt_instance[i]] = scene.cloud.semantic[i];
  }
  REQUIRE(!objects.empty());
  for (const auto& [id, pts] : objects) {
    const ClassInfo& cls = cfg.at(object_class[id]);
    SplitParams sp;
    sp.ref_length = cls.length;
    sp.ref_width = cls.width;
    // The min-area box of a jittered grid can tilt slightly, so its long side
    // may poke past the footprint; a small margin absorbs that.
    sp.margin = 0.05;
    CHECK(fits_in_reference(pts, sp));
  }
}

TEST_CASE("generate_scene: density falloff grows neighbor spacing with range") {
  ClassConfig cfg = small_config();
  synth::SceneParams params;
  params.seed = 17;
  params.target_points = 30000;
  params.object_count = 0;  // ground only
  params.density_falloff = true;

  const synth::Scene scene = synth::generate_scene(params, cfg);
  std::vector<Point2> near_pts, far_pts;
  for (const auto& p : scene.cloud.xyz) {
    const double r = std::hypot(p[0], p[1]);
    if (r < 10.0) near_pts.push_back({p[0], p[1]});
    if (r > 35.0) far_pts.push_back({p[0], p[1]});
  }
  REQUIRE(near_pts.size() > 100);
  REQUIRE(far_pts.size() > 100);

  const auto mean_nn = [](const std::vector<Point2>& pts) {
    const KdTree2 tree{std::vector<Point2>(pts)};
    double sum = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) sum += tree.knn(i, 1)[0].distance;
    return sum / static_cast<double>(pts.size());
  };
  CHECK(mean_nn(far_pts) > 1.5 * mean_nn(near_pts));
}

TEST_CASE("merged_row: blobs, gaps and bookkeeping") {
  synth::Rng rng(2);
  const ClassInfo car = thing(10, "car", 4.0, 1.8);
  const std::vector<double> gaps{0.5, 1.0};
  const synth::MergedRow row = synth::merged_row(car, gaps, 0.2, 0.2, 0.3, {5, -2}, rng);
  REQUIRE(row.points.size() == row.blob_of_point.size());
  const std::set<std::uint32_t> blobs(row.blob_of_point.begin(), row.blob_of_point.end());
  CHECK(blobs == std::set<std::uint32_t>{0, 1, 2});

  // Blob-to-blob nearest distances respect the requested gaps (within jitter).
  for (std::uint32_t b = 0; b + 1 < 3; ++b) {
    double min_d = 1e9;
    for (std::size_t i = 0; i < row.points.size(); ++i) {
      if (row.blob_of_point[i] != b) continue;
      for (std::size_t j = 0; j < row.points.size(); ++j) {
        if (row.blob_of_point[j] != b + 1) continue;
        min_d = std::min(min_d, distance(row.points[i], row.points[j]));
      }
    }
    CHECK(min_d >= gaps[b] - 1e-9);
    CHECK(min_d <= gaps[b] + 0.25);
  }
}
