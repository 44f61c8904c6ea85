#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tcn/anchors.hpp"
#include "tcn/batching.hpp"
#include "tcn/core.hpp"
#include "tcn/nn/checkpoint.hpp"
#include "tcn/nn/layers.hpp"
#include "tcn/nn/optimizer.hpp"
#include "tcn/ranker.hpp"
#include "tcn/sampling.hpp"

namespace tcn {

struct ClassifierConfig {
  Eigen::Index feature_dim = 0;
  int num_classes = 1;  // foreground classes; the softmax has num_classes + 1 outputs
  double iou_pos = 0.7;
  double iou_neg = 0.3;
  int batch_size = 1024;
  int bg_per_batch = 64;
  nn::OptimizerConfig optimizer{0.001, 0.9, 5e-5};

  void validate() const;
};

/// Sum of outer products of the rows of `z` (l x D), i.e. z^T z, vectorized row-major.
template <typename Derived>
nn::Vector<typename Derived::Scalar> bilinear_pool(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  if (z.rows() < 1) throw Error(ErrorCode::kEmptySegment, "bilinear pooling over zero features");
  const Eigen::Index d = z.cols();
  nn::Matrix<Scalar> gram = nn::Matrix<Scalar>::Zero(d, d);
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  gram.template triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return Eigen::Map<const nn::Vector<Scalar>>(gram.data(), gram.size());
}

/// sign(x) * sqrt(|x|) followed by l2 normalization. The zero vector maps to itself.
template <typename Derived>
nn::Vector<typename Derived::Scalar> signed_sqrt_l2(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  nn::Vector<Scalar> y = x.unaryExpr([](Scalar v) {
    return v < Scalar(0) ? -std::sqrt(-v) : std::sqrt(v);
  });
  const Scalar norm = y.norm();
  if (norm > Scalar(0)) y /= norm;
  return y;
}

/// Bilinear + signed-sqrt/l2 encoding of every frame inside `a` (clamped to the video).
/// Throws kEmptySegment when `a` lies entirely outside the video.
nn::Vector<double> encode_segment(const FeatureSequence& fs, const TemporalInterval& a);

/// Class label for training: the dominant class (largest total intersection, ties to the
/// smallest id) when max IoU > iou_pos, 0 (background) when max IoU < iou_neg, otherwise
/// nullopt (ignored).
std::optional<int> assign_class_label(const TemporalInterval& a, const GroundTruthAnnotation& gt,
                                      double iou_pos = 0.7, double iou_neg = 0.3);

struct ClassifierExample {
  nn::Vector<double> features;
  int label = 0;
};

std::vector<ClassifierExample> build_classifier_examples(std::span<const FeatureSequence> videos,
                                                         std::span<const GroundTruthAnnotation> gt,
                                                         const AnchorConfig& anchors,
                                                         const ClassifierConfig& cfg);

/// bg_per_batch background samples and batch_size - bg_per_batch foreground samples.
Batch make_classifier_batch(std::span<const int> labels, const ClassifierConfig& cfg,
                            std::mt19937_64& rng);

class Classifier {
 public:
  Classifier(const ClassifierConfig& cfg, std::uint64_t seed);

  const ClassifierConfig& config() const { return cfg_; }

  /// Probability vector over {background, 1..num_classes}.
  nn::Vector<double> classify(const FeatureSequence& fs, const TemporalInterval& a) const;
  /// Batch x (num_classes + 1) probabilities from encoded segments (one per row).
  nn::Matrix<double> predict(const nn::Matrix<double>& encoded) const;

  Ranker::StepResult accumulate_gradients(const nn::Matrix<double>& encoded,
                                          std::span<const int> labels);
  Ranker::StepResult train_step(const nn::Matrix<double>& encoded, std::span<const int> labels);

  std::vector<nn::Parameter<double>*> parameters() { return {&fc_.weight, &fc_.bias}; }

  nn::Checkpoint to_checkpoint() const;
  static Classifier from_checkpoint(const nn::Checkpoint& ckpt);

  void zero_weights();

 private:
  ClassifierConfig cfg_;
  nn::Linear<double> fc_;
};

Classifier train_classifier(std::span<const ClassifierExample> examples, const ClassifierConfig& cfg,
                            int iterations, std::uint64_t seed, TrainLog* log = nullptr);

}  // namespace tcn
