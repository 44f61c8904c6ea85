#pragma once

#include <string>

#include <Eigen/Core>

#include "tcn/anchors.hpp"
#include "tcn/core.hpp"

namespace tcn {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-frame features of one video: row t holds the D-dimensional feature of frame t.
/// Stored in single precision; everything downstream computes in double.
struct FeatureSequence {
  std::string video_id;
  RowMatrix<float> values;

  Frame num_frames() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }

  /// Throws kDimensionMismatch for empty or non-finite data.
  void validate() const;
};

/// n x D samples drawn from one interval.
using SampledFeatures = RowMatrix<double>;

struct ContextPair {
  SampledFeatures inner;
  SampledFeatures outer;
};

/// Frame index of sample j when drawing n samples from `a`: floor(begin + (j + 0.5) * length / n).
Frame sample_frame(const TemporalInterval& a, int n, int j);

/// n rows sampled at bin centers; frames outside the video give zero rows.
SampledFeatures sample_uniform(const FeatureSequence& fs, const TemporalInterval& a, int n);

/// Same-center interval of length round(scale_factor * length).
TemporalInterval context_interval(const Proposal& p, double scale_factor);

ContextPair build_context_pair(const FeatureSequence& fs, const Proposal& p, int n,
                               double scale_factor);

}  // namespace tcn
