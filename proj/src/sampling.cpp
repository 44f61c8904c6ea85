#include "tcn/sampling.hpp"

#include <cmath>

namespace tcn {

namespace {

Frame floor_div(Frame num, Frame den) {
  Frame q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

Frame round_half_up(double x) { return static_cast<Frame>(std::floor(x + 0.5)); }

}  // namespace

void FeatureSequence::validate() const {
  if (values.rows() < 1 || values.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "feature sequence '" + video_id + "' is empty");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature sequence '" + video_id + "' has non-finite values");
  }
}

Frame sample_frame(const TemporalInterval& a, int n, int j) {
  // Exact integer form of floor(begin + (2j + 1) * length / (2n)).
  const Frame den = 2 * static_cast<Frame>(n);
  return floor_div(a.begin * den + (2 * static_cast<Frame>(j) + 1) * a.length(), den);
}

SampledFeatures sample_uniform(const FeatureSequence& fs, const TemporalInterval& a, int n) {
  if (n < 1) throw Error(ErrorCode::kShapeError, "sample count must be >= 1");
  if (!a.valid()) throw Error(ErrorCode::kShapeError, "cannot sample from an empty interval");
  if (fs.values.rows() < 1 || fs.values.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "feature sequence '" + fs.video_id + "' is empty");
  }

  SampledFeatures out = SampledFeatures::Zero(n, fs.dim());
  for (int j = 0; j < n; ++j) {
    const Frame t = sample_frame(a, n, j);
    if (t >= 0 && t < fs.num_frames()) out.row(j) = fs.values.row(t).cast<double>();
  }
  return out;
}

TemporalInterval context_interval(const Proposal& p, double scale_factor) {
  if (!(scale_factor >= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "context scale factor must be >= 1");
  }
  const Frame length = round_half_up(scale_factor * static_cast<double>(p.interval.length()));
  const Frame begin = round_half_up(p.interval.center() - 0.5 * static_cast<double>(length));
  return {begin, begin + length};
}

ContextPair build_context_pair(const FeatureSequence& fs, const Proposal& p, int n,
                               double scale_factor) {
  return {sample_uniform(fs, p.interval, n),
          sample_uniform(fs, context_interval(p, scale_factor), n)};
}

}  // namespace tcn
