#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tcn/anchors.hpp"
#include "tcn/core.hpp"

namespace tcn {

/// Per-video proposals in descending score order.
using RankedProposals = std::map<std::string, std::vector<TemporalInterval>>;

/// {0.50, 0.55, ..., 0.95}
std::vector<double> default_tiou_grid();

/// Fraction of all ground-truth intervals covered (IoU >= threshold) by one of the first k
/// proposals of their video. Throws kNoGroundTruth when `gt` holds no intervals.
double recall_at_k(const RankedProposals& proposals, std::span<const GroundTruthAnnotation> gt,
                   int k, double iou_threshold);

/// Mean of recall_at_k over a tIoU grid.
double average_recall(const RankedProposals& proposals, std::span<const GroundTruthAnnotation> gt,
                      int k, std::span<const double> grid);
double average_recall(const RankedProposals& proposals, std::span<const GroundTruthAnnotation> gt,
                      int k);

struct RecallCurve {
  std::vector<double> iou_grid;
  std::vector<double> recall;
  int proposals_per_video = 0;
};

RecallCurve recall_vs_iou_curve(const RankedProposals& proposals,
                                std::span<const GroundTruthAnnotation> gt, int k,
                                std::span<const double> grid);

/// Recall at a fixed threshold as the proposal budget grows.
struct RecallVsCount {
  std::vector<int> counts;
  std::vector<double> recall;
  double iou_threshold = 0.5;
};

RecallVsCount recall_vs_count_curve(const RankedProposals& proposals,
                                    std::span<const GroundTruthAnnotation> gt,
                                    std::span<const int> counts, double iou_threshold);

struct APResult {
  std::map<int, double> per_class_ap;
  double map_value = 0.0;
  double tiou = 0.5;
};

/// Area under the non-increasing precision envelope. `is_tp` lists detections in rank order.
double average_precision(const std::vector<bool>& is_tp, std::size_t num_gt);

/// Per-class AP with greedy score-ordered matching, averaged over classes present in `gt`.
APResult mean_average_precision(std::span<const Detection> detections,
                                std::span<const GroundTruthAnnotation> gt, double tiou);

/// Intervals of already-ranked proposals, keyed by video.
RankedProposals to_ranked(const std::string& video_id, std::span<const Proposal> ranked);

}  // namespace tcn
