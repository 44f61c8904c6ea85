#include "tcn/core.hpp"

#include <algorithm>

namespace tcn {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kEmptyAfterClamp: return "EmptyAfterClamp";
    case ErrorCode::kEmptySegment: return "EmptySegment";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kStateError: return "StateError";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kNoNegatives: return "NoNegatives";
    case ErrorCode::kNoGroundTruth: return "NoGroundTruth";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kDimOverflow: return "DimOverflow";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Frame intersection_length(const TemporalInterval& a, const TemporalInterval& b) {
  return std::max<Frame>(0, std::min(a.end, b.end) - std::max(a.begin, b.begin));
}

double iou(const TemporalInterval& a, const TemporalInterval& b) {
  const Frame inter = intersection_length(a, b);
  const Frame uni = a.length() + b.length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

TemporalInterval clamp_to_video(const TemporalInterval& a, Frame num_frames) {
  TemporalInterval out{std::max<Frame>(a.begin, 0), std::min(a.end, num_frames)};
  if (!out.valid()) {
    throw Error(ErrorCode::kEmptyAfterClamp,
                "interval [" + std::to_string(a.begin) + "," + std::to_string(a.end) +
                    ") does not overlap [0," + std::to_string(num_frames) + ")");
  }
  return out;
}

double max_iou(const TemporalInterval& a, const GroundTruthAnnotation& gt) {
  double best = 0.0;
  for (const auto& g : gt.intervals) best = std::max(best, iou(a, g.interval));
  return best;
}

}  // namespace tcn
