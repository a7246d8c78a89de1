#include <doctest.h>

#include <algorithm>
#include <map>

#include "bevclust/errors.hpp"
#include "bevclust/metrics.hpp"
#include "bevclust/oracle.hpp"
#include "bevclust/synth.hpp"
#include "test_support.hpp"

using namespace bevclust;
using namespace bevclust::testsupport;

namespace {

// A labeling over n points, all of one class, with instance ids per segment.
InstanceLabeling segments(std::uint32_t class_id, const std::vector<std::uint32_t>& instances) {
  InstanceLabeling out;
  out.semantic.assign(instances.size(), class_id);
  out.instance = instances;
  return out;
}

InstanceLabeling random_labeling(synth::Rng& rng, const ClassConfig& cfg, std::size_t n) {
  InstanceLabeling out;
  std::vector<std::uint32_t> ids;
  for (const ClassInfo& c : cfg.classes) ids.push_back(c.id);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t cls = ids[rng.index(ids.size())];
    out.semantic.push_back(cls);
    out.instance.push_back(cfg.at(cls).thing ? 1 + static_cast<std::uint32_t>(rng.index(4)) : 0);
  }
  return out;
}

const ClassReport& class_report(const PanopticReport& rep, std::uint32_t id) {
  for (const ClassReport& c : rep.classes) {
    if (c.id == id) return c;
  }
  REQUIRE(false);
  return rep.classes.front();
}

}  // namespace

TEST_CASE("iou_per_class: identity, disjoint and partial overlap") {
  const ClassConfig cfg = small_config();

  InstanceLabeling a = segments(10, {1, 1, 1, 1});
  const SemanticIou perfect = iou_per_class(a.semantic, a.semantic, cfg);
  CHECK(perfect.per_class.at(10) == 1.0);
  CHECK(perfect.miou == 1.0);

  // Disjoint masks: pred says car where gt says road.
  std::vector<std::uint32_t> pred{10, 10, 40, 40};
  std::vector<std::uint32_t> gt{40, 40, 10, 10};
  const SemanticIou disjoint = iou_per_class(pred, gt, cfg);
  CHECK(disjoint.per_class.at(10) == 0.0);
  CHECK(disjoint.per_class.at(40) == 0.0);

  // Pred mask 8 points, gt mask 10, overlap 6 -> IoU = 6 / 12.
  std::vector<std::uint32_t> p2, g2;
  for (int i = 0; i < 6; ++i) { p2.push_back(10); g2.push_back(10); }   // overlap
  for (int i = 0; i < 2; ++i) { p2.push_back(10); g2.push_back(40); }   // pred only
  for (int i = 0; i < 4; ++i) { p2.push_back(40); g2.push_back(10); }   // gt only
  const SemanticIou partial = iou_per_class(p2, g2, cfg);
  CHECK(partial.per_class.at(10) == doctest::Approx(0.5));

  CHECK_THROWS_AS(iou_per_class(std::vector<std::uint32_t>{10}, g2, cfg), ContractViolation);
}

TEST_CASE("iou_per_class: classes absent everywhere are excluded from the mean") {
  const ClassConfig cfg = small_config();
  std::vector<std::uint32_t> pred{10, 10};
  std::vector<std::uint32_t> gt{10, 10};
  const SemanticIou iou = iou_per_class(pred, gt, cfg);
  CHECK(iou.per_class.size() == 1);  // only car defined
  CHECK(iou.miou == 1.0);
}

TEST_CASE("match_segments: identical segmentations are all TP") {
  const ClassConfig cfg = small_config();
  const InstanceLabeling x = segments(10, {1, 1, 2, 2, 2, 3});
  const ClassMatches m = match_segments(x, x, 10, cfg);
  CHECK(m.tp.size() == 3);
  CHECK(m.fp.empty());
  CHECK(m.fn.empty());
  for (const SegmentMatch& t : m.tp) CHECK(t.iou == 1.0);
}

TEST_CASE("match_segments: 6+4 split of a 10-point object") {
  const ClassConfig cfg = small_config();
  // gt: one object of 10 points; pred: splits it 6 + 4.
  const InstanceLabeling gt = segments(10, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  const InstanceLabeling pred = segments(10, {1, 1, 1, 1, 1, 1, 2, 2, 2, 2});
  const ClassMatches m = match_segments(pred, gt, 10, cfg);
  REQUIRE(m.tp.size() == 1);  // IoU 6/10 > 0.5
  CHECK(m.tp[0].pred_instance == 1);
  CHECK(m.tp[0].iou == doctest::Approx(0.6));
  CHECK(m.fp.size() == 1);  // the 4-point fragment, IoU 0.4
  CHECK(m.fn.empty());
}

TEST_CASE("match_segments: merging two objects yields no TP") {
  const ClassConfig cfg = small_config();
  // gt: two 10-point objects; pred: one 20-point segment. IoU = 10/20 = 0.5,
  // not strictly greater than 0.5.
  std::vector<std::uint32_t> gt_inst(20, 1);
  std::fill(gt_inst.begin() + 10, gt_inst.end(), 2);
  const InstanceLabeling gt = segments(10, gt_inst);
  const InstanceLabeling pred = segments(10, std::vector<std::uint32_t>(20, 1));
  const ClassMatches m = match_segments(pred, gt, 10, cfg);
  CHECK(m.tp.empty());
  CHECK(m.fp.size() == 1);
  CHECK(m.fn.size() == 2);
}

TEST_CASE("match_segments: void ground truth is excluded") {
  const ClassConfig cfg = small_config();
  InstanceLabeling pred = segments(10, {1, 1, 1, 1});
  InstanceLabeling gt = segments(10, {1, 1, 1, 1});
  gt.semantic[3] = 0;  // void: drops from both sides
  const ClassMatches m = match_segments(pred, gt, 10, cfg);
  REQUIRE(m.tp.size() == 1);
  CHECK(m.tp[0].intersection == 3);
  CHECK(m.tp[0].iou == 1.0);
}

TEST_CASE("match_segments: min segment size suppresses small FP/FN") {
  ClassConfig cfg = small_config();
  cfg.min_segment_points = 3;
  // pred has an extra 2-point segment; gt an extra 2-point object.
  InstanceLabeling pred = segments(10, {1, 1, 1, 1, 2, 2, 0, 0});
  InstanceLabeling gt = segments(10, {1, 1, 1, 1, 0, 0, 3, 3});
  pred.semantic[6] = pred.semantic[7] = 40;
  gt.semantic[4] = gt.semantic[5] = 40;
  const ClassMatches m = match_segments(pred, gt, 10, cfg);
  CHECK(m.tp.size() == 1);
  CHECK(m.fp.empty());  // 2-point fragment below min size
  CHECK(m.fn.empty());
}

TEST_CASE("panoptic_quality: perfect prediction scores 100 everywhere") {
  const ClassConfig cfg = small_config();
  synth::Rng rng(1234);
  const InstanceLabeling x = random_labeling(rng, cfg, 500);
  const PanopticReport rep = panoptic_quality(x, x, cfg);
  CHECK(rep.pq == 1.0);
  CHECK(rep.pq_dagger == 1.0);
  CHECK(rep.rq == 1.0);
  CHECK(rep.sq == 1.0);
  CHECK(rep.miou == 1.0);
  CHECK(rep.pq_things == 1.0);
  CHECK(rep.pq_stuff == 1.0);
}

TEST_CASE("panoptic_quality: one TP at IoU 0.8 plus one FN") {
  const ClassConfig cfg = small_config();
  // gt: object 1 with 10 points, object 2 with 5 points.
  // pred: 8 points of object 1 labeled, 2 points void-ish (stuff), object 2 missed.
  InstanceLabeling gt = segments(10, std::vector<std::uint32_t>(15, 1));
  std::fill(gt.instance.begin() + 10, gt.instance.end(), 2);
  InstanceLabeling pred = segments(10, std::vector<std::uint32_t>(15, 1));
  pred.semantic[8] = pred.semantic[9] = 40;  // drop 2 points of object 1
  pred.instance[8] = pred.instance[9] = 0;
  std::fill(pred.semantic.begin() + 10, pred.semantic.end(), 40);  // miss object 2
  std::fill(pred.instance.begin() + 10, pred.instance.end(), 0);

  const ClassMatches m = match_segments(pred, gt, 10, cfg);
  REQUIRE(m.tp.size() == 1);
  CHECK(m.tp[0].iou == doctest::Approx(0.8));
  CHECK(m.fn.size() == 1);

  const PanopticReport rep = panoptic_quality(pred, gt, cfg);
  const ClassReport& car = class_report(rep, 10);
  CHECK(car.sq == doctest::Approx(0.8));
  CHECK(car.rq == doctest::Approx(2.0 / 3.0));
  CHECK(car.pq == doctest::Approx(0.53333).epsilon(1e-4));
}

TEST_CASE("panoptic_quality: PQ decomposes exactly into SQ * RQ") {
  const ClassConfig cfg = small_config();
  synth::Rng rng(777);
  for (int round = 0; round < 20; ++round) {
    const InstanceLabeling pred = random_labeling(rng, cfg, 300);
    const InstanceLabeling gt = random_labeling(rng, cfg, 300);
    const PanopticReport rep = panoptic_quality(pred, gt, cfg);
    for (const ClassReport& c : rep.classes) {
      CHECK(std::abs(c.pq - c.sq * c.rq) <= 1e-12);
    }
  }
}

TEST_CASE("panoptic_quality: instance ids may be relabeled freely") {
  const ClassConfig cfg = small_config();
  synth::Rng rng(888);
  const InstanceLabeling gt = random_labeling(rng, cfg, 400);
  InstanceLabeling pred = random_labeling(rng, cfg, 400);

  InstanceLabeling relabeled = pred;
  for (std::uint32_t& inst : relabeled.instance) {
    if (inst != 0) inst = inst * 31 + 7;  // injective on the small id range
  }
  const PanopticReport a = panoptic_quality(pred, gt, cfg);
  const PanopticReport b = panoptic_quality(relabeled, gt, cfg);
  CHECK(a.pq == b.pq);
  CHECK(a.rq == b.rq);
  CHECK(a.sq == b.sq);
  CHECK(a.miou == b.miou);
}

TEST_CASE("panoptic_quality: greedy matching equals exhaustive matching") {
  const ClassConfig cfg = small_config();
  synth::Rng rng(999);
  for (int round = 0; round < 30; ++round) {
    // Few segments per side so the exhaustive oracle stays fast.
    InstanceLabeling pred, gt;
    const std::size_t n = 60;
    for (std::size_t i = 0; i < n; ++i) {
      pred.semantic.push_back(rng.uniform01() < 0.8 ? 10 : 40);
      gt.semantic.push_back(rng.uniform01() < 0.8 ? 10 : 40);
      pred.instance.push_back(pred.semantic.back() == 10
                                  ? 1 + static_cast<std::uint32_t>(rng.index(5))
                                  : 0);
      gt.instance.push_back(gt.semantic.back() == 10
                                ? 1 + static_cast<std::uint32_t>(rng.index(5))
                                : 0);
    }
    const ClassMatches greedy = match_segments(pred, gt, 10, cfg);
    const std::vector<SegmentMatch> optimal = oracle::match_exhaustive(pred, gt, 10, cfg);
    REQUIRE(greedy.tp.size() == optimal.size());
    for (std::size_t i = 0; i < optimal.size(); ++i) {
      CHECK(greedy.tp[i].pred_instance == optimal[i].pred_instance);
      CHECK(greedy.tp[i].gt_instance == optimal[i].gt_instance);
      CHECK(greedy.tp[i].iou == optimal[i].iou);
    }
  }
}

TEST_CASE("accumulator: sequence aggregation sums counts before dividing") {
  const ClassConfig cfg = small_config();
  // Scan 1: perfect car. Scan 2: the 0.8-IoU case.
  const InstanceLabeling perfect = segments(10, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  InstanceLabeling gt2 = segments(10, std::vector<std::uint32_t>(10, 1));
  InstanceLabeling pred2 = segments(10, std::vector<std::uint32_t>(10, 1));
  pred2.semantic[8] = pred2.semantic[9] = 40;

  PanopticAccumulator acc(cfg);
  acc.add_scan(perfect, perfect);
  acc.add_scan(pred2, gt2);
  const PanopticReport rep = acc.report();
  const ClassReport& car = class_report(rep, 10);
  CHECK(car.tp == 2);
  CHECK(car.sq == doctest::Approx((1.0 + 0.8) / 2.0));
  CHECK(car.rq == 1.0);

  // Merging two accumulators equals adding both scans to one.
  PanopticAccumulator a(cfg), b(cfg);
  a.add_scan(perfect, perfect);
  b.add_scan(pred2, gt2);
  a.merge(b);
  const PanopticReport merged = a.report();
  CHECK(merged.pq == rep.pq);
  CHECK(merged.miou == rep.miou);
}

TEST_CASE("stuff classes: one segment per class per scan") {
  const ClassConfig cfg = small_config();
  // 10 road points, pred covers 6 of them (IoU 0.6 > 0.5 -> TP).
  InstanceLabeling gt = segments(40, std::vector<std::uint32_t>(10, 0));
  InstanceLabeling pred = gt;
  for (int i = 0; i < 4; ++i) pred.semantic[i] = 50;  // mislabel as building
  const PanopticReport rep = panoptic_quality(pred, gt, cfg);
  const ClassReport& road = class_report(rep, 40);
  CHECK(road.tp == 1);
  CHECK(road.sq == doctest::Approx(0.6));
  CHECK(road.rq == 1.0);
  const ClassReport& building = class_report(rep, 50);
  CHECK(building.tp == 0);  // pred-only, IoU 0 -> FP
  CHECK(building.fp == 1);
  CHECK(building.fn == 0);
}

TEST_CASE("distance bins: validation and assignment") {
  const ClassConfig cfg = small_config();
  CHECK_THROWS_AS(validate_bins(std::vector<RangeInterval>{}), ContractViolation);
  CHECK_THROWS_AS(validate_bins(std::vector<RangeInterval>{{0, 15}, {20, 30}}),
                  ContractViolation);
  CHECK_THROWS_AS(validate_bins(std::vector<RangeInterval>{{0, 15}, {10, 30}}),
                  ContractViolation);
  CHECK_THROWS_AS(validate_bins(std::vector<RangeInterval>{{0, 15}, {15, 30}}),
                  ContractViolation);  // does not reach infinity

  const auto bins = bins_from_edges(std::vector<double>{0.0, 15.0, 30.0});
  REQUIRE(bins.size() == 3);
  CHECK(bins[0].lo == 0.0);
  CHECK(bins[1].lo == 15.0);
  CHECK(bins[2].hi == std::numeric_limits<double>::infinity());
}

TEST_CASE("distance bins: all points in one bin reproduce the global report") {
  const ClassConfig cfg = small_config();
  PointCloud cloud;
  append_points(cloud, {{1, 0}, {2, 0}, {3, 0}, {4, 0}}, 10);
  InstanceLabeling gt = segments(10, {1, 1, 2, 2});
  InstanceLabeling pred = segments(10, {5, 5, 6, 6});

  const auto bins = bins_from_edges(std::vector<double>{0.0, 15.0, 30.0});
  const auto reports = distance_binned_report(pred, gt, cloud, bins, cfg);
  const PanopticReport global = panoptic_quality(pred, gt, cfg);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].pq == global.pq);
  CHECK(class_report(reports[0], 10).tp == class_report(global, 10).tp);
  CHECK(!class_report(reports[1], 10).present);
}

TEST_CASE("distance bins: per-bin TP counts sum to the global count") {
  const ClassConfig cfg = small_config();
  // Two objects fully inside different bins.
  PointCloud cloud;
  append_points(cloud, {{1, 0}, {1.5, 0}, {2, 0}}, 10);
  append_points(cloud, {{20, 0}, {20.5, 0}, {21, 0}}, 10);
  InstanceLabeling gt = segments(10, {1, 1, 1, 2, 2, 2});
  InstanceLabeling pred = segments(10, {9, 9, 9, 4, 4, 4});

  const auto bins = bins_from_edges(std::vector<double>{0.0, 15.0, 30.0});
  const auto reports = distance_binned_report(pred, gt, cloud, bins, cfg);
  const PanopticReport global = panoptic_quality(pred, gt, cfg);
  std::uint64_t tp_sum = 0;
  for (const PanopticReport& r : reports) tp_sum += class_report(r, 10).tp;
  CHECK(tp_sum == class_report(global, 10).tp);
  CHECK(tp_sum == 2);
}

TEST_CASE("instance oracle: splits along gt boundaries, semantics untouched") {
  const ClassConfig cfg = small_config();
  // gt: two car objects; pred semantics merge them plus mislabel two points.
  InstanceLabeling gt = segments(10, {1, 1, 1, 2, 2, 2});
  std::vector<std::uint32_t> pred_sem{10, 10, 10, 10, 40, 10};

  const InstanceLabeling refined = make_instance_oracle(pred_sem, gt, cfg);
  CHECK(refined.semantic == pred_sem);
  // Points 0..2 share a gt segment -> one instance; 3 and 5 another.
  CHECK(refined.instance[0] == refined.instance[1]);
  CHECK(refined.instance[1] == refined.instance[2]);
  CHECK(refined.instance[3] == refined.instance[5]);
  CHECK(refined.instance[0] != refined.instance[3]);
  CHECK(refined.instance[4] == 0);  // stuff prediction

  // mIoU identical to evaluating the raw semantics.
  InstanceLabeling plain;
  plain.semantic = pred_sem;
  plain.instance.assign(pred_sem.size(), 0);
  const SemanticIou a = iou_per_class(plain.semantic, gt.semantic, cfg);
  const SemanticIou b = iou_per_class(refined.semantic, gt.semantic, cfg);
  CHECK(a.miou == b.miou);
}

TEST_CASE("report formatting: table and kv contain aggregates") {
  const ClassConfig cfg = small_config();
  const InstanceLabeling x = segments(10, {1, 1, 2, 2});
  const PanopticReport rep = panoptic_quality(x, x, cfg);
  const std::string table = format_report_table(rep);
  CHECK(table.find("car") != std::string::npos);
  CHECK(table.find("PQ 100.0") != std::string::npos);
  const std::string kv = format_report_kv(rep);
  CHECK(kv.find("aggregate.pq = 100.000000") != std::string::npos);
  CHECK(kv.find("class.10.tp = 2") != std::string::npos);
}
