#pragma once

#include <optional>
#include <vector>

#include "tcn/core.hpp"

namespace tcn {

/// Sliding-window pyramid: windows of `base_length` frames at 50% overlap, each
/// expanded into `num_scales` lengths base_length * 2^(k-1) around a shared center.
struct AnchorConfig {
  Frame base_length = 16;
  int num_scales = 4;

  void validate() const;
};

struct Proposal {
  TemporalInterval interval;
  int position = 0;  // window index i, starting at 0
  int scale = 1;     // pyramid level k in [1, K]
  std::optional<double> score;
};

/// Number of window positions for a video of `num_frames` frames.
int num_positions(const AnchorConfig& cfg, Frame num_frames);

/// Every anchor of the pyramid, ordered by position then scale. Intervals are not clamped.
std::vector<Proposal> generate_anchors(const AnchorConfig& cfg, Frame num_frames);

/// Fraction of `gt` intervals reached by at least one anchor with IoU >= iou_threshold.
double pyramid_coverage_recall(const std::vector<Proposal>& anchors,
                               const GroundTruthAnnotation& gt, double iou_threshold);

}  // namespace tcn
