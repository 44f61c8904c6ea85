#include "tcn/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tcn {

std::vector<double> default_tiou_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.5 + 0.05 * i);
  return grid;
}

namespace {

std::size_t count_gt(std::span<const GroundTruthAnnotation> gt) {
  std::size_t n = 0;
  for (const auto& g : gt) n += g.intervals.size();
  return n;
}

}  // namespace

double recall_at_k(const RankedProposals& proposals, std::span<const GroundTruthAnnotation> gt,
                   int k, double iou_threshold) {
  const std::size_t total = count_gt(gt);
  if (total == 0) throw Error(ErrorCode::kNoGroundTruth, "recall needs at least one ground-truth interval");
  if (k <= 0) return 0.0;

  std::size_t hit = 0;
  for (const auto& video : gt) {
    const auto it = proposals.find(video.video_id);
    if (it == proposals.end()) continue;
    const auto& ranked = it->second;
    const std::size_t top = std::min(ranked.size(), static_cast<std::size_t>(k));
    for (const auto& g : video.intervals) {
      for (std::size_t i = 0; i < top; ++i) {
        if (iou(ranked[i], g.interval) >= iou_threshold) {
          ++hit;
          break;
        }
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

double average_recall(const RankedProposals& proposals, std::span<const GroundTruthAnnotation> gt,
                      int k, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidConfig, "average recall needs a non-empty tIoU grid");
  double sum = 0.0;
  for (const double t : grid) sum += recall_at_k(proposals, gt, k, t);
  return sum / static_cast<double>(grid.size());
}

double average_recall(const RankedProposals& proposals, std::span<const GroundTruthAnnotation> gt,
                      int k) {
  const auto grid = default_tiou_grid();
  return average_recall(proposals, gt, k, grid);
}

RecallCurve recall_vs_iou_curve(const RankedProposals& proposals,
                                std::span<const GroundTruthAnnotation> gt, int k,
                                std::span<const double> grid) {
  RecallCurve curve;
  curve.proposals_per_video = k;
  for (const double t : grid) {
    curve.iou_grid.push_back(t);
    curve.recall.push_back(recall_at_k(proposals, gt, k, t));
  }
  return curve;
}

RecallVsCount recall_vs_count_curve(const RankedProposals& proposals,
                                    std::span<const GroundTruthAnnotation> gt,
                                    std::span<const int> counts, double iou_threshold) {
  RecallVsCount curve;
  curve.iou_threshold = iou_threshold;
  for (const int k : counts) {
    curve.counts.push_back(k);
    curve.recall.push_back(recall_at_k(proposals, gt, k, iou_threshold));
  }
  return curve;
}

double average_precision(const std::vector<bool>& is_tp, std::size_t num_gt) {
  if (num_gt == 0) return 0.0;
  const std::size_t n = is_tp.size();
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_tp[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  // Each true positive raises recall by 1/num_gt; integrate the envelope over those steps.
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_tp[i]) sum += precision[i];
  }
  return sum / static_cast<double>(num_gt);
}

APResult mean_average_precision(std::span<const Detection> detections,
                                std::span<const GroundTruthAnnotation> gt, double tiou) {
  std::set<int> classes;
  for (const auto& video : gt) {
    for (const auto& g : video.intervals) classes.insert(g.class_id);
  }
  if (classes.empty()) throw Error(ErrorCode::kNoGroundTruth, "mAP needs at least one ground-truth interval");

  APResult result;
  result.tiou = tiou;
  for (const int cls : classes) {
    // Ground truth of this class per video, ordered by begin so IoU ties go to the earlier one.
    std::map<std::string, std::vector<TemporalInterval>> truth;
    std::size_t num_gt = 0;
    for (const auto& video : gt) {
      for (const auto& g : video.intervals) {
        if (g.class_id != cls) continue;
        truth[video.video_id].push_back(g.interval);
        ++num_gt;
      }
    }
    for (auto& [vid, intervals] : truth) {
      std::stable_sort(intervals.begin(), intervals.end(),
                       [](const TemporalInterval& a, const TemporalInterval& b) { return a.begin < b.begin; });
    }
    std::map<std::string, std::vector<bool>> matched;
    for (const auto& [vid, intervals] : truth) matched[vid].assign(intervals.size(), false);

    std::vector<const Detection*> ranked;
    for (const auto& d : detections) {
      if (d.class_id == cls) ranked.push_back(&d);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Detection* a, const Detection* b) { return a->score > b->score; });

    std::vector<bool> is_tp;
    is_tp.reserve(ranked.size());
    for (const Detection* d : ranked) {
      bool tp = false;
      const auto it = truth.find(d->video_id);
      if (it != truth.end()) {
        auto& used = matched[d->video_id];
        double best = -1.0;
        std::size_t best_idx = 0;
        for (std::size_t j = 0; j < it->second.size(); ++j) {
          if (used[j]) continue;
          const double o = iou(d->interval, it->second[j]);
          if (o > best) {
            best = o;
            best_idx = j;
          }
        }
        if (best >= tiou) {
          used[best_idx] = true;
          tp = true;
        }
      }
      is_tp.push_back(tp);
    }
    result.per_class_ap[cls] = average_precision(is_tp, num_gt);
  }

  double sum = 0.0;
  for (const auto& [cls, ap] : result.per_class_ap) sum += ap;
  result.map_value = sum / static_cast<double>(result.per_class_ap.size());
  return result;
}

RankedProposals to_ranked(const std::string& video_id, std::span<const Proposal> ranked) {
  RankedProposals out;
  auto& list = out[video_id];
  for (const auto& p : ranked) list.push_back(p.interval);
  return out;
}

}  // namespace tcn
