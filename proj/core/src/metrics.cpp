#include "bevclust/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bevclust/errors.hpp"

namespace bevclust {

namespace {

void check_same_size(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw ContractViolation(std::string(where) + ": label array length mismatch (" +
                            std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

ClassMatches match_segments(const InstanceLabeling& pred, const InstanceLabeling& gt,
                            std::uint32_t class_id, const ClassConfig& config) {
  check_same_size(pred.size(), gt.size(), "match_segments");
  check_same_size(pred.instance.size(), pred.semantic.size(), "match_segments(pred)");
  check_same_size(gt.instance.size(), gt.semantic.size(), "match_segments(gt)");
  const ClassInfo& cls = config.at(class_id);
  if (!cls.thing) {
    throw ContractViolation("match_segments: class " + std::to_string(class_id) +
                            " is not a thing class");
  }

  std::unordered_map<std::uint32_t, std::uint64_t> pred_size, gt_size;
  std::unordered_map<std::uint64_t, std::uint64_t> inter;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (config.is_void(gt.semantic[i])) continue;
    const bool in_pred = pred.semantic[i] == class_id;
    const bool in_gt = gt.semantic[i] == class_id;
    if (in_pred) ++pred_size[pred.instance[i]];
    if (in_gt) ++gt_size[gt.instance[i]];
    if (in_pred && in_gt) ++inter[pair_key(pred.instance[i], gt.instance[i])];
  }

  ClassMatches out;
  std::unordered_set<std::uint32_t> matched_pred, matched_gt;
  for (const auto& [key, overlap] : inter) {
    const auto pi = static_cast<std::uint32_t>(key >> 32);
    const auto gi = static_cast<std::uint32_t>(key & 0xffffffffu);
    const std::uint64_t uni = pred_size[pi] + gt_size[gi] - overlap;
    const double iou = static_cast<double>(overlap) / static_cast<double>(uni);
    if (iou > 0.5) {
      if (!matched_pred.insert(pi).second || !matched_gt.insert(gi).second) {
        throw ContractViolation("match_segments: IoU > 0.5 produced a non-unique matching");
      }
      out.tp.push_back({class_id, pi, gi, overlap, uni, iou});
    }
  }
  for (const auto& [pi, size] : pred_size) {
    if (!matched_pred.count(pi) && size >= config.min_segment_points) out.fp.push_back({pi, size});
  }
  for (const auto& [gi, size] : gt_size) {
    if (!matched_gt.count(gi) && size >= config.min_segment_points) out.fn.push_back({gi, size});
  }

  // TP order keyed on the ground-truth id: downstream IoU sums then come out
  // identical under any relabeling of predicted instance ids.
  std::sort(out.tp.begin(), out.tp.end(),
            [](const SegmentMatch& a, const SegmentMatch& b) { return a.gt_instance < b.gt_instance; });
  const auto by_id = [](const SegmentRef& a, const SegmentRef& b) { return a.instance < b.instance; };
  std::sort(out.fp.begin(), out.fp.end(), by_id);
  std::sort(out.fn.begin(), out.fn.end(), by_id);
  return out;
}

SemanticIou iou_per_class(std::span<const std::uint32_t> pred_semantic,
                          std::span<const std::uint32_t> gt_semantic, const ClassConfig& config) {
  check_same_size(pred_semantic.size(), gt_semantic.size(), "iou_per_class");

  std::map<std::uint32_t, std::array<std::uint64_t, 3>> counts;  // pred, gt, intersection
  for (const ClassInfo& c : config.classes) counts[c.id] = {0, 0, 0};
  for (std::size_t i = 0; i < pred_semantic.size(); ++i) {
    if (config.is_void(gt_semantic[i])) continue;
    if (auto it = counts.find(pred_semantic[i]); it != counts.end()) ++it->second[0];
    if (auto it = counts.find(gt_semantic[i]); it != counts.end()) {
      ++it->second[1];
      if (pred_semantic[i] == gt_semantic[i]) ++it->second[2];
    }
  }

  SemanticIou out;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& [id, c] : counts) {
    const std::uint64_t uni = c[0] + c[1] - c[2];
    if (uni == 0) continue;  // absent from both: IoU undefined
    const double iou = static_cast<double>(c[2]) / static_cast<double>(uni);
    out.per_class[id] = iou;
    sum += iou;
    ++defined;
  }
  out.miou = defined ? sum / static_cast<double>(defined) : 0.0;
  return out;
}

PanopticAccumulator::PanopticAccumulator(const ClassConfig& config) : config_(&config) {
  for (const ClassInfo& c : config.classes) per_class_[c.id] = {};
}

void PanopticAccumulator::add_scan(const InstanceLabeling& pred, const InstanceLabeling& gt) {
  check_same_size(pred.size(), gt.size(), "PanopticAccumulator::add_scan");

  // Semantic point counts, void ground truth excluded.
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (config_->is_void(gt.semantic[i])) continue;
    if (auto it = per_class_.find(pred.semantic[i]); it != per_class_.end()) {
      ++it->second.pred_points;
    }
    if (auto it = per_class_.find(gt.semantic[i]); it != per_class_.end()) {
      ++it->second.gt_points;
      if (pred.semantic[i] == gt.semantic[i]) ++it->second.intersection_points;
    }
  }

  for (const ClassInfo& cls : config_->classes) {
    ClassAccum& acc = per_class_[cls.id];
    if (cls.thing) {
      const ClassMatches m = match_segments(pred, gt, cls.id, *config_);
      acc.tp += m.tp.size();
      acc.fp += m.fp.size();
      acc.fn += m.fn.size();
      for (const SegmentMatch& t : m.tp) acc.iou_sum += t.iou;
      continue;
    }
    // Stuff: one segment per class per scan.
    std::uint64_t p = 0, g = 0, inter = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (config_->is_void(gt.semantic[i])) continue;
      const bool in_pred = pred.semantic[i] == cls.id;
      const bool in_gt = gt.semantic[i] == cls.id;
      p += in_pred;
      g += in_gt;
      inter += in_pred && in_gt;
    }
    if (p == 0 && g == 0) continue;
    const double iou = static_cast<double>(inter) / static_cast<double>(p + g - inter);
    if (iou > 0.5) {
      ++acc.tp;
      acc.iou_sum += iou;
    } else {
      if (p >= config_->min_segment_points && p > 0) ++acc.fp;
      if (g >= config_->min_segment_points && g > 0) ++acc.fn;
    }
  }
}

void PanopticAccumulator::merge(const PanopticAccumulator& other) {
  for (const auto& [id, acc] : other.per_class_) {
    ClassAccum& mine = per_class_[id];
    mine.tp += acc.tp;
    mine.fp += acc.fp;
    mine.fn += acc.fn;
    mine.iou_sum += acc.iou_sum;
    mine.pred_points += acc.pred_points;
    mine.gt_points += acc.gt_points;
    mine.intersection_points += acc.intersection_points;
  }
}

PanopticReport PanopticAccumulator::report() const {
  PanopticReport rep;
  double pq_sum = 0, sq_sum = 0, rq_sum = 0, iou_sum = 0, dagger_sum = 0;
  double pq_things_sum = 0, pq_stuff_sum = 0;
  std::size_t present = 0, things_present = 0, stuff_present = 0;

  for (const ClassInfo& cls : config_->classes) {
    const ClassAccum& acc = per_class_.at(cls.id);
    ClassReport cr;
    cr.id = cls.id;
    cr.name = cls.name;
    cr.thing = cls.thing;
    cr.tp = acc.tp;
    cr.fp = acc.fp;
    cr.fn = acc.fn;
    cr.present = acc.pred_points + acc.gt_points > 0;
    if (cr.present) {
      const std::uint64_t uni = acc.pred_points + acc.gt_points - acc.intersection_points;
      cr.iou = static_cast<double>(acc.intersection_points) / static_cast<double>(uni);
      cr.sq = acc.tp ? acc.iou_sum / static_cast<double>(acc.tp) : 0.0;
      const double denom = static_cast<double>(acc.tp) + 0.5 * static_cast<double>(acc.fp) +
                           0.5 * static_cast<double>(acc.fn);
      cr.rq = denom > 0 ? static_cast<double>(acc.tp) / denom : 0.0;
      cr.pq = cr.sq * cr.rq;

      ++present;
      pq_sum += cr.pq;
      sq_sum += cr.sq;
      rq_sum += cr.rq;
      iou_sum += cr.iou;
      dagger_sum += cls.thing ? cr.pq : cr.iou;
      if (cls.thing) {
        pq_things_sum += cr.pq;
        ++things_present;
      } else {
        pq_stuff_sum += cr.pq;
        ++stuff_present;
      }
    }
    rep.classes.push_back(std::move(cr));
  }

  if (present) {
    const auto n = static_cast<double>(present);
    rep.pq = pq_sum / n;
    rep.sq = sq_sum / n;
    rep.rq = rq_sum / n;
    rep.miou = iou_sum / n;
    rep.pq_dagger = dagger_sum / n;
  }
  if (things_present) rep.pq_things = pq_things_sum / static_cast<double>(things_present);
  if (stuff_present) rep.pq_stuff = pq_stuff_sum / static_cast<double>(stuff_present);
  return rep;
}

PanopticReport panoptic_quality(const InstanceLabeling& pred, const InstanceLabeling& gt,
                                const ClassConfig& config) {
  PanopticAccumulator acc(config);
  acc.add_scan(pred, gt);
  return acc.report();
}

void validate_bins(std::span<const RangeInterval> bins) {
  if (bins.empty()) throw ContractViolation("distance bins: empty bin list");
  if (bins.front().lo != 0.0) throw ContractViolation("distance bins: first bin must start at 0");
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (!(bins[i].lo < bins[i].hi)) throw ContractViolation("distance bins: empty interval");
    if (i + 1 < bins.size() && bins[i].hi != bins[i + 1].lo) {
      throw ContractViolation("distance bins: intervals must tile [0, inf) without overlap");
    }
  }
  if (bins.back().hi != std::numeric_limits<double>::infinity()) {
    throw ContractViolation("distance bins: last interval must extend to infinity");
  }
}

std::vector<RangeInterval> bins_from_edges(std::span<const double> edges) {
  std::vector<RangeInterval> bins;
  if (edges.empty()) {
    bins.push_back({0.0, std::numeric_limits<double>::infinity()});
    return bins;
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const double hi = i + 1 < edges.size() ? edges[i + 1] : std::numeric_limits<double>::infinity();
    bins.push_back({edges[i], hi});
  }
  validate_bins(bins);
  return bins;
}

BinnedPanopticAccumulator::BinnedPanopticAccumulator(const ClassConfig& config,
                                                     std::vector<RangeInterval> bins)
    : bins_(std::move(bins)) {
  validate_bins(bins_);
  accumulators_.assign(bins_.size(), PanopticAccumulator(config));
}

void BinnedPanopticAccumulator::add_scan(const InstanceLabeling& pred, const InstanceLabeling& gt,
                                         const PointCloud& cloud) {
  check_same_size(pred.size(), cloud.size(), "BinnedPanopticAccumulator::add_scan");
  check_same_size(pred.size(), gt.size(), "BinnedPanopticAccumulator::add_scan");

  std::vector<InstanceLabeling> pred_bin(bins_.size()), gt_bin(bins_.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double r = std::hypot(static_cast<double>(cloud.xyz[i][0]),
                                static_cast<double>(cloud.xyz[i][1]));
    for (std::size_t b = 0; b < bins_.size(); ++b) {
      if (r >= bins_[b].lo && r < bins_[b].hi) {
        pred_bin[b].semantic.push_back(pred.semantic[i]);
        pred_bin[b].instance.push_back(pred.instance[i]);
        gt_bin[b].semantic.push_back(gt.semantic[i]);
        gt_bin[b].instance.push_back(gt.instance[i]);
        break;
      }
    }
  }
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    accumulators_[b].add_scan(pred_bin[b], gt_bin[b]);
  }
}

std::vector<PanopticReport> BinnedPanopticAccumulator::reports() const {
  std::vector<PanopticReport> out;
  out.reserve(accumulators_.size());
  for (const PanopticAccumulator& acc : accumulators_) out.push_back(acc.report());
  return out;
}

std::vector<PanopticReport> distance_binned_report(const InstanceLabeling& pred,
                                                   const InstanceLabeling& gt,
                                                   const PointCloud& cloud,
                                                   std::span<const RangeInterval> bins,
                                                   const ClassConfig& config) {
  BinnedPanopticAccumulator acc(config, std::vector<RangeInterval>(bins.begin(), bins.end()));
  acc.add_scan(pred, gt, cloud);
  return acc.reports();
}

InstanceLabeling make_instance_oracle(std::span<const std::uint32_t> pred_semantic,
                                      const InstanceLabeling& gt, const ClassConfig& config) {
  check_same_size(pred_semantic.size(), gt.size(), "make_instance_oracle");

  InstanceLabeling out;
  out.semantic.assign(pred_semantic.begin(), pred_semantic.end());
  out.instance.assign(pred_semantic.size(), 0);

  // New instance per (pred thing class, ground-truth segment) intersection,
  // numbered in first-appearance order.
  std::map<std::array<std::uint32_t, 3>, std::uint32_t> ids;
  std::uint32_t next = 1;
  for (std::size_t i = 0; i < pred_semantic.size(); ++i) {
    const ClassInfo* cls = config.find(pred_semantic[i]);
    if (!cls || !cls->thing) continue;
    const std::array<std::uint32_t, 3> key{pred_semantic[i], gt.semantic[i], gt.instance[i]};
    auto [it, inserted] = ids.try_emplace(key, next);
    if (inserted) ++next;
    out.instance[i] = it->second;
  }
  return out;
}

namespace {

std::string pct(double fraction, int width = 7) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%*.1f", width, fraction * 100.0);
  return buf;
}

}  // namespace

std::string format_report_table(const PanopticReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %-5s %7s %7s %7s %7s %7s %7s %7s\n", "class", "kind",
                "PQ", "SQ", "RQ", "IoU", "TP", "FP", "FN");
  os << line << std::string(16 + 6 + 7 * 8 + 7, '-') << "\n";
  for (const ClassReport& c : report.classes) {
    if (!c.present) continue;
    std::snprintf(line, sizeof line, "%-16s %-5s %s %s %s %s %7llu %7llu %7llu\n", c.name.c_str(),
                  c.thing ? "thing" : "stuff", pct(c.pq).c_str(), pct(c.sq).c_str(),
                  pct(c.rq).c_str(), pct(c.iou).c_str(),
                  static_cast<unsigned long long>(c.tp), static_cast<unsigned long long>(c.fp),
                  static_cast<unsigned long long>(c.fn));
    os << line;
  }
  os << std::string(16 + 6 + 7 * 8 + 7, '-') << "\n";
  std::snprintf(line, sizeof line,
                "PQ %.1f | PQ_dagger %.1f | RQ %.1f | SQ %.1f | mIoU %.1f | PQ_Th %.1f | PQ_St %.1f\n",
                report.pq * 100, report.pq_dagger * 100, report.rq * 100, report.sq * 100,
                report.miou * 100, report.pq_things * 100, report.pq_stuff * 100);
  os << line;
  return os.str();
}

std::string format_report_kv(const PanopticReport& report) {
  std::ostringstream os;
  char line[160];
  const auto kv = [&](const std::string& key, double fraction) {
    std::snprintf(line, sizeof line, "%s = %.6f\n", key.c_str(), fraction * 100.0);
    os << line;
  };
  kv("aggregate.pq", report.pq);
  kv("aggregate.pq_dagger", report.pq_dagger);
  kv("aggregate.rq", report.rq);
  kv("aggregate.sq", report.sq);
  kv("aggregate.miou", report.miou);
  kv("aggregate.pq_things", report.pq_things);
  kv("aggregate.pq_stuff", report.pq_stuff);
  for (const ClassReport& c : report.classes) {
    if (!c.present) continue;
    const std::string prefix = "class." + std::to_string(c.id);
    os << prefix << ".name = " << c.name << "\n";
    os << prefix << ".kind = " << (c.thing ? "thing" : "stuff") << "\n";
    kv(prefix + ".pq", c.pq);
    kv(prefix + ".sq", c.sq);
    kv(prefix + ".rq", c.rq);
    kv(prefix + ".iou", c.iou);
    os << prefix << ".tp = " << c.tp << "\n";
    os << prefix << ".fp = " << c.fp << "\n";
    os << prefix << ".fn = " << c.fn << "\n";
  }
  return os.str();
}

}  // namespace bevclust
