#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcn/error.hpp"

namespace tcn {

using Frame = std::int64_t;

/// Half-open frame interval [begin, end). Valid intervals have end > begin.
struct TemporalInterval {
  Frame begin = 0;
  Frame end = 1;

  Frame length() const { return end - begin; }
  bool valid() const { return end > begin; }
  double center() const { return 0.5 * static_cast<double>(begin + end); }

  friend bool operator==(const TemporalInterval&, const TemporalInterval&) = default;
};

/// Number of frames shared by two intervals (0 when disjoint).
Frame intersection_length(const TemporalInterval& a, const TemporalInterval& b);

/// Temporal intersection-over-union of two valid intervals, in [0, 1].
double iou(const TemporalInterval& a, const TemporalInterval& b);

/// Intersection of `a` with [0, num_frames). Throws kEmptyAfterClamp when nothing is left.
TemporalInterval clamp_to_video(const TemporalInterval& a, Frame num_frames);

struct LabeledInterval {
  TemporalInterval interval;
  int class_id = 1;  // 0 is background and never annotated

  friend bool operator==(const LabeledInterval&, const LabeledInterval&) = default;
};

struct GroundTruthAnnotation {
  std::string video_id;
  std::vector<LabeledInterval> intervals;

  friend bool operator==(const GroundTruthAnnotation&, const GroundTruthAnnotation&) = default;
};

struct Detection {
  std::string video_id;
  TemporalInterval interval;
  int class_id = 1;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Largest IoU between `a` and any ground-truth interval; 0 when there is none.
double max_iou(const TemporalInterval& a, const GroundTruthAnnotation& gt);

}  // namespace tcn
