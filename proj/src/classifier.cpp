#include "tcn/classifier.hpp"

#include <map>

#include <json.hpp>

namespace tcn {

using nn::Index;
using nn::Matrix;

void ClassifierConfig::validate() const {
  if (feature_dim < 1) throw Error(ErrorCode::kInvalidConfig, "classifier feature dimension must be >= 1");
  if (num_classes < 1) throw Error(ErrorCode::kInvalidConfig, "classifier needs at least one class");
  if (!(iou_neg < iou_pos)) throw Error(ErrorCode::kInvalidConfig, "iou_neg must be below iou_pos");
  if (batch_size < 1 || bg_per_batch < 0 || bg_per_batch > batch_size) {
    throw Error(ErrorCode::kInvalidConfig, "background count must lie in [0, batch_size]");
  }
  optimizer.validate();
}

nn::Vector<double> encode_segment(const FeatureSequence& fs, const TemporalInterval& a) {
  TemporalInterval inside;
  try {
    inside = clamp_to_video(a, fs.num_frames());
  } catch (const Error&) {
    throw Error(ErrorCode::kEmptySegment, "segment [" + std::to_string(a.begin) + "," +
                                              std::to_string(a.end) + ") has no frames in '" +
                                              fs.video_id + "'");
  }
  const Matrix<double> z = fs.values.middleRows(inside.begin, inside.length()).cast<double>();
  return signed_sqrt_l2(bilinear_pool(z));
}

std::optional<int> assign_class_label(const TemporalInterval& a, const GroundTruthAnnotation& gt,
                                      double iou_pos, double iou_neg) {
  const double best = max_iou(a, gt);
  if (best < iou_neg) return 0;
  if (best <= iou_pos) return std::nullopt;

  std::map<int, Frame> overlap;
  for (const auto& g : gt.intervals) overlap[g.class_id] += intersection_length(a, g.interval);
  int label = 0;
  Frame most = -1;
  for (const auto& [cls, frames] : overlap) {  // ascending id, so ties keep the smallest
    if (frames > most) {
      most = frames;
      label = cls;
    }
  }
  return label;
}

std::vector<ClassifierExample> build_classifier_examples(std::span<const FeatureSequence> videos,
                                                         std::span<const GroundTruthAnnotation> gt,
                                                         const AnchorConfig& anchors,
                                                         const ClassifierConfig& cfg) {
  if (videos.size() != gt.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one annotation per feature sequence required");
  }
  std::vector<ClassifierExample> out;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    for (const auto& p : generate_anchors(anchors, videos[v].num_frames())) {
      const auto label = assign_class_label(p.interval, gt[v], cfg.iou_pos, cfg.iou_neg);
      if (!label) continue;
      out.push_back({encode_segment(videos[v], p.interval), *label});
    }
  }
  return out;
}

Batch make_classifier_batch(std::span<const int> labels, const ClassifierConfig& cfg,
                            std::mt19937_64& rng) {
  std::vector<std::size_t> background;
  std::vector<std::size_t> foreground;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 0 ? background : foreground).push_back(i);
  const auto n_bg = static_cast<std::size_t>(cfg.bg_per_batch);
  const auto n_fg = static_cast<std::size_t>(cfg.batch_size) - n_bg;
  if (n_fg > 0 && foreground.empty()) {
    throw Error(ErrorCode::kNoPositives, "no foreground segments to train on");
  }
  if (n_bg > 0 && background.empty()) {
    throw Error(ErrorCode::kNoNegatives, "no background segments to train on");
  }

  Batch batch;
  batch.indices = draw_from_pool(std::move(background), n_bg, rng);
  const auto fg = draw_from_pool(std::move(foreground), n_fg, rng);
  batch.indices.insert(batch.indices.end(), fg.begin(), fg.end());
  for (const auto i : batch.indices) batch.labels.push_back(labels[i]);
  return batch;
}

Classifier::Classifier(const ClassifierConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), fc_(cfg.feature_dim * cfg.feature_dim, cfg.num_classes + 1) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  fc_.init(rng);
}

void Classifier::zero_weights() {
  fc_.weight.value.setZero();
  fc_.bias.value.setZero();
}

Matrix<double> Classifier::predict(const Matrix<double>& encoded) const {
  return nn::softmax_rows<double>(fc_.apply(encoded));
}

nn::Vector<double> Classifier::classify(const FeatureSequence& fs, const TemporalInterval& a) const {
  nn::require_shape(fs.dim() == cfg_.feature_dim,
                    "classifier: expected feature dimension " + std::to_string(cfg_.feature_dim));
  const nn::Vector<double> x = encode_segment(fs, a);
  return predict(x.transpose()).row(0).transpose();
}

Ranker::StepResult Classifier::accumulate_gradients(const Matrix<double>& encoded,
                                                    std::span<const int> labels) {
  const auto loss = nn::softmax_xent_batch<double>(fc_.forward(encoded), labels);
  fc_.backward(loss.grad);
  std::size_t correct = 0;
  for (Index r = 0; r < loss.probs.rows(); ++r) {
    Index best = 0;
    loss.probs.row(r).maxCoeff(&best);
    if (best == labels[static_cast<std::size_t>(r)]) ++correct;
  }
  return {loss.loss, static_cast<double>(correct) / static_cast<double>(labels.size())};
}

Ranker::StepResult Classifier::train_step(const Matrix<double>& encoded, std::span<const int> labels) {
  const auto params = parameters();
  nn::zero_grads(params);
  const auto r = accumulate_gradients(encoded, labels);
  nn::sgd_step(params, cfg_.optimizer);
  return r;
}

nn::Checkpoint Classifier::to_checkpoint() const {
  nlohmann::ordered_json meta;
  meta["kind"] = "classifier";
  meta["feature_dim"] = cfg_.feature_dim;
  meta["num_classes"] = cfg_.num_classes;
  meta["iou_pos"] = cfg_.iou_pos;
  meta["iou_neg"] = cfg_.iou_neg;
  nn::Checkpoint ckpt;
  ckpt.metadata = meta.dump();
  ckpt.tensors = {fc_.weight.value, fc_.bias.value};
  return ckpt;
}

Classifier Classifier::from_checkpoint(const nn::Checkpoint& ckpt) {
  ClassifierConfig cfg;
  try {
    const auto meta = nlohmann::json::parse(ckpt.metadata);
    if (meta.value("kind", "") != "classifier") {
      throw Error(ErrorCode::kValidationError, "checkpoint does not hold a classifier");
    }
    cfg.feature_dim = meta.at("feature_dim").get<Index>();
    cfg.num_classes = meta.at("num_classes").get<int>();
    cfg.iou_pos = meta.at("iou_pos").get<double>();
    cfg.iou_neg = meta.at("iou_neg").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("classifier checkpoint metadata: ") + e.what());
  }
  Classifier model(cfg, 0);
  if (ckpt.tensors.size() != 2 || ckpt.tensors[0].rows() != model.fc_.weight.value.rows() ||
      ckpt.tensors[0].cols() != model.fc_.weight.value.cols() ||
      ckpt.tensors[1].rows() != 1 || ckpt.tensors[1].cols() != model.fc_.bias.value.cols()) {
    throw Error(ErrorCode::kValidationError, "classifier checkpoint tensors have the wrong shape");
  }
  model.fc_.weight.value = ckpt.tensors[0];
  model.fc_.bias.value = ckpt.tensors[1];
  return model;
}

Classifier train_classifier(std::span<const ClassifierExample> examples, const ClassifierConfig& cfg,
                            int iterations, std::uint64_t seed, TrainLog* log) {
  Classifier model(cfg, seed);
  if (iterations <= 0) return model;

  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) labels.push_back(e.label);
  const Index width = cfg.feature_dim * cfg.feature_dim;

  std::mt19937_64 batch_rng(seed ^ 0x9E3779B97F4A7C15ull);
  for (int it = 0; it < iterations; ++it) {
    Batch batch = make_classifier_batch(labels, cfg, batch_rng);
    Matrix<double> x(static_cast<Index>(batch.size()), width);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      x.row(static_cast<Index>(i)) = examples[batch.indices[i]].features.transpose();
    }
    const auto step = model.train_step(x, batch.labels);
    if (log != nullptr) {
      log->loss.push_back(step.loss);
      log->accuracy.push_back(step.accuracy);
      if (log->keep_batches) log->batches.push_back(std::move(batch));
    }
  }
  return model;
}

}  // namespace tcn
