#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tcn/anchors.hpp"
#include "tcn/batching.hpp"
#include "tcn/core.hpp"
#include "tcn/nn/checkpoint.hpp"
#include "tcn/nn/layers.hpp"
#include "tcn/nn/optimizer.hpp"
#include "tcn/sampling.hpp"

namespace tcn {

struct RankerConfig {
  int samples = 16;  // n, per scale
  Eigen::Index feature_dim = 0;
  int conv_channels = 64;
  int hidden = 500;
  double scale_factor = 2.0;
  double iou_pos = 0.7;
  double iou_neg = 0.3;
  int batch_size = 1024;
  double pos_frac = 0.5;
  bool share_conv = false;
  bool relu_after_hidden = true;
  nn::OptimizerConfig optimizer{0.1, 0.9, 5e-5};

  void validate() const;
  /// Length of the concatenated branch features: 2 * (n - 6) * conv_channels.
  Eigen::Index concat_width() const;
};

enum class RankLabel { kPositive, kNegative, kIgnore };

/// Positive above iou_pos, negative below iou_neg, ignored in between (boundaries are ignored).
RankLabel assign_rank_label(const TemporalInterval& a, const GroundTruthAnnotation& gt,
                            double iou_pos = 0.7, double iou_neg = 0.3);
inline RankLabel assign_rank_label(const Proposal& p, const GroundTruthAnnotation& gt,
                                   double iou_pos = 0.7, double iou_neg = 0.3) {
  return assign_rank_label(p.interval, gt, iou_pos, iou_neg);
}

struct RankerExample {
  ContextPair pair;
  int label = 0;  // 1 foreground, 0 background
};

/// Context pairs for every non-ignored anchor of every video.
std::vector<RankerExample> build_ranker_examples(std::span<const FeatureSequence> videos,
                                                 std::span<const GroundTruthAnnotation> gt,
                                                 const AnchorConfig& anchors,
                                                 const RankerConfig& cfg);

/// round(batch_size * pos_frac) positives and the rest negatives. Throws kNoPositives /
/// kNoNegatives when a polarity is absent.
Batch make_ranker_batch(std::span<const int> labels, const RankerConfig& cfg, std::mt19937_64& rng);
Batch make_ranker_batch(std::span<const int> labels, const RankerConfig& cfg, std::uint64_t seed);

/// Two-branch temporal conv ranker:
///   per branch: conv(5) -> ReLU -> avgpool(3) -> flatten; concat -> FC(hidden) -> ReLU -> FC(2)
class Ranker {
 public:
  Ranker(const RankerConfig& cfg, std::uint64_t seed);

  const RankerConfig& config() const { return cfg_; }

  /// Foreground probability.
  double score(const ContextPair& pair) const;
  /// Batch x 2 class probabilities; column 1 is foreground.
  nn::Matrix<double> predict(const nn::SequenceBatch<double>& inner,
                             const nn::SequenceBatch<double>& outer) const;
  nn::Matrix<double> logits(const nn::SequenceBatch<double>& inner,
                            const nn::SequenceBatch<double>& outer) const;

  struct StepResult {
    double loss;
    double accuracy;
  };
  /// Forward + backward; gradients accumulate into the parameters. No update.
  StepResult accumulate_gradients(const nn::SequenceBatch<double>& inner,
                                  const nn::SequenceBatch<double>& outer,
                                  std::span<const int> labels);
  /// One momentum-SGD step on a batch.
  StepResult train_step(const nn::SequenceBatch<double>& inner,
                        const nn::SequenceBatch<double>& outer, std::span<const int> labels);

  std::vector<nn::Parameter<double>*> parameters();
  std::vector<const nn::Parameter<double>*> parameters() const;

  nn::Checkpoint to_checkpoint() const;
  static Ranker from_checkpoint(const nn::Checkpoint& ckpt);

  /// Zero the final layer so every input scores exactly 0.5.
  void zero_output_layer();

 private:
  nn::TemporalConv<double>& outer_conv() { return cfg_.share_conv ? conv_inner_ : conv_outer_; }
  const nn::TemporalConv<double>& outer_conv() const {
    return cfg_.share_conv ? conv_inner_ : conv_outer_;
  }

  RankerConfig cfg_;
  nn::TemporalConv<double> conv_inner_;
  nn::TemporalConv<double> conv_outer_;
  nn::Relu<double> relu_inner_;
  nn::Relu<double> relu_outer_;
  nn::AvgPool3<double> pool_inner_;
  nn::AvgPool3<double> pool_outer_;
  nn::Linear<double> fc_hidden_;
  nn::Relu<double> relu_hidden_;
  nn::Linear<double> fc_out_;
};

/// Stacks the inner and outer samples of the selected examples into two sequence batches.
std::pair<nn::SequenceBatch<double>, nn::SequenceBatch<double>> stack_pairs(
    std::span<const RankerExample> examples, std::span<const std::size_t> indices);

struct TrainLog {
  std::vector<double> loss;
  std::vector<double> accuracy;  // on each batch, before its update
  std::vector<Batch> batches;    // filled only when keep_batches is set
  bool keep_batches = false;
};

Ranker train_ranker(std::span<const RankerExample> examples, const RankerConfig& cfg,
                    int iterations, std::uint64_t seed, TrainLog* log = nullptr);

/// Scores every anchor and sorts by descending score; ties go to the earlier begin, then
/// the smaller scale.
std::vector<Proposal> rank_proposals(const FeatureSequence& fs, std::span<const Proposal> anchors,
                                     const Ranker& model);

/// Ordering used by rank_proposals.
bool ranked_before(const Proposal& a, const Proposal& b);

}  // namespace tcn
