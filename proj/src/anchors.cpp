#include "tcn/anchors.hpp"

#include <string>

namespace tcn {

void AnchorConfig::validate() const {
  if (base_length < 2 || base_length % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig,
                "anchor base length must be even and >= 2, got " + std::to_string(base_length));
  }
  if (num_scales < 1) {
    throw Error(ErrorCode::kInvalidConfig,
                "anchor scale count must be >= 1, got " + std::to_string(num_scales));
  }
}

int num_positions(const AnchorConfig& cfg, Frame num_frames) {
  cfg.validate();
  if (num_frames < 1) return 0;
  const Frame stride = cfg.base_length / 2;
  return static_cast<int>((num_frames - 1) / stride + 1);
}

std::vector<Proposal> generate_anchors(const AnchorConfig& cfg, Frame num_frames) {
  const int positions = num_positions(cfg, num_frames);
  const Frame stride = cfg.base_length / 2;

  std::vector<Proposal> out;
  out.reserve(static_cast<std::size_t>(positions) * cfg.num_scales);
  for (int i = 0; i < positions; ++i) {
    const Frame center = i * stride + stride;
    Frame half = stride;
    for (int k = 1; k <= cfg.num_scales; ++k, half *= 2) {
      out.push_back(Proposal{{center - half, center + half}, i, k, std::nullopt});
    }
  }
  return out;
}

double pyramid_coverage_recall(const std::vector<Proposal>& anchors,
                               const GroundTruthAnnotation& gt, double iou_threshold) {
  if (gt.intervals.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& g : gt.intervals) {
    for (const auto& a : anchors) {
      if (iou(a.interval, g.interval) >= iou_threshold) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(gt.intervals.size());
}

}  // namespace tcn
