#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bevclust/class_config.hpp"
#include "bevclust/cluster.hpp"

namespace bevclust {

/// A matched (prediction, ground-truth) segment pair of one class.
struct SegmentMatch {
  std::uint32_t class_id = 0;
  std::uint32_t pred_instance = 0;
  std::uint32_t gt_instance = 0;
  std::uint64_t intersection = 0;
  std::uint64_t union_size = 0;
  double iou = 0.0;
};

/// An unmatched segment (false positive or false negative).
struct SegmentRef {
  std::uint32_t instance = 0;
  std::uint64_t size = 0;
};

struct ClassMatches {
  std::vector<SegmentMatch> tp;
  std::vector<SegmentRef> fp;
  std::vector<SegmentRef> fn;
};

/// Matches the segments of one thing class between a prediction and the ground
/// truth. A pair is a true positive iff IoU > 0.5 (strict), which makes the
/// matching unique. Points whose ground-truth label is void are dropped before
/// counting; unmatched segments smaller than config.min_segment_points are not
/// counted as FP/FN. Results are sorted by instance id.
ClassMatches match_segments(const InstanceLabeling& pred, const InstanceLabeling& gt,
                            std::uint32_t class_id, const ClassConfig& config);

/// Per-class semantic intersection-over-union plus the mean over classes
/// present in prediction or ground truth (void ground-truth points excluded).
struct SemanticIou {
  std::map<std::uint32_t, double> per_class;  // only classes with a defined IoU
  double miou = 0.0;
};

SemanticIou iou_per_class(std::span<const std::uint32_t> pred_semantic,
                          std::span<const std::uint32_t> gt_semantic, const ClassConfig& config);

struct ClassReport {
  std::uint32_t id = 0;
  std::string name;
  bool thing = false;
  bool present = false;  // appears in prediction or ground truth
  double pq = 0.0, sq = 0.0, rq = 0.0, iou = 0.0;  // fractions in [0, 1]
  std::uint64_t tp = 0, fp = 0, fn = 0;
};

/// Per-class and aggregate panoptic metrics. All values are fractions in
/// [0, 1]; the text formatters print them as percentages.
struct PanopticReport {
  std::vector<ClassReport> classes;
  double pq = 0.0, pq_dagger = 0.0, rq = 0.0, sq = 0.0, miou = 0.0;
  double pq_things = 0.0, pq_stuff = 0.0;
};

/// Accumulates matching statistics over a scan sequence. Sums of TP/FP/FN
/// counts and IoU values are kept per class and divided only when the report
/// is produced, so accumulators can be merged exactly.
class PanopticAccumulator {
 public:
  explicit PanopticAccumulator(const ClassConfig& config);

  /// Thing classes are matched per match_segments; each stuff class
  /// contributes at most one segment per scan.
  void add_scan(const InstanceLabeling& pred, const InstanceLabeling& gt);

  /// Exact merge of another accumulator built from the same config.
  void merge(const PanopticAccumulator& other);

  PanopticReport report() const;

 private:
  struct ClassAccum {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    double iou_sum = 0.0;
    std::uint64_t pred_points = 0, gt_points = 0, intersection_points = 0;
  };

  const ClassConfig* config_;
  std::map<std::uint32_t, ClassAccum> per_class_;
};

/// Single-scan convenience wrapper around PanopticAccumulator.
PanopticReport panoptic_quality(const InstanceLabeling& pred, const InstanceLabeling& gt,
                                const ClassConfig& config);

/// Half-open range interval [lo, hi), meters from the sensor in BEV.
struct RangeInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Throws ContractViolation unless the intervals are sorted, non-overlapping,
/// gap-free and cover [0, inf).
void validate_bins(std::span<const RangeInterval> bins);

/// Builds [0, e1), [e1, e2), ..., [en, inf) from ascending edges {0, e1, ...}.
std::vector<RangeInterval> bins_from_edges(std::span<const double> edges);

/// Independent metric accumulation per sensor-distance bin. Points are
/// assigned to bins by their BEV range in the cloud.
class BinnedPanopticAccumulator {
 public:
  BinnedPanopticAccumulator(const ClassConfig& config, std::vector<RangeInterval> bins);

  void add_scan(const InstanceLabeling& pred, const InstanceLabeling& gt,
                const PointCloud& cloud);

  const std::vector<RangeInterval>& bins() const { return bins_; }
  std::vector<PanopticReport> reports() const;

 private:
  std::vector<RangeInterval> bins_;
  std::vector<PanopticAccumulator> accumulators_;
};

/// Single-scan convenience wrapper around BinnedPanopticAccumulator.
std::vector<PanopticReport> distance_binned_report(const InstanceLabeling& pred,
                                                   const InstanceLabeling& gt,
                                                   const PointCloud& cloud,
                                                   std::span<const RangeInterval> bins,
                                                   const ClassConfig& config);

/// Splits the predicted semantics along ground-truth instance boundaries
/// without touching the semantic labels: every (pred thing class, ground-truth
/// segment) intersection becomes one instance.
InstanceLabeling make_instance_oracle(std::span<const std::uint32_t> pred_semantic,
                                      const InstanceLabeling& gt, const ClassConfig& config);

/// Human-readable per-class table, values as percentages.
std::string format_report_table(const PanopticReport& report);

/// Machine-readable key/value rendering ("key = value" lines).
std::string format_report_kv(const PanopticReport& report);

}  // namespace bevclust
