#include "tcn/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace tcn {

using nn::Index;
using nn::Matrix;
using nn::SequenceBatch;

void RankerConfig::validate() const {
  if (samples < 7) {
    throw Error(ErrorCode::kInvalidConfig, "ranker needs at least 7 samples per scale (conv 5 + pool 3)");
  }
  if (feature_dim < 1) throw Error(ErrorCode::kInvalidConfig, "ranker feature dimension must be >= 1");
  if (conv_channels < 1 || hidden < 1) {
    throw Error(ErrorCode::kInvalidConfig, "ranker layer widths must be >= 1");
  }
  if (!(scale_factor >= 1.0)) throw Error(ErrorCode::kInvalidConfig, "context scale factor must be >= 1");
  if (!(iou_neg < iou_pos)) throw Error(ErrorCode::kInvalidConfig, "iou_neg must be below iou_pos");
  if (!(pos_frac > 0.0 && pos_frac < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "positive fraction must lie in (0, 1)");
  }
  if (batch_size < 2) throw Error(ErrorCode::kInvalidConfig, "ranker batch size must be >= 2");
  optimizer.validate();
}

Index RankerConfig::concat_width() const {
  return 2 * static_cast<Index>(samples - 6) * conv_channels;
}

RankLabel assign_rank_label(const TemporalInterval& a, const GroundTruthAnnotation& gt,
                            double iou_pos, double iou_neg) {
  const double best = max_iou(a, gt);
  if (best > iou_pos) return RankLabel::kPositive;
  if (best < iou_neg) return RankLabel::kNegative;
  return RankLabel::kIgnore;
}

std::vector<RankerExample> build_ranker_examples(std::span<const FeatureSequence> videos,
                                                 std::span<const GroundTruthAnnotation> gt,
                                                 const AnchorConfig& anchors,
                                                 const RankerConfig& cfg) {
  if (videos.size() != gt.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one annotation per feature sequence required");
  }
  std::vector<RankerExample> out;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    for (const auto& p : generate_anchors(anchors, videos[v].num_frames())) {
      const RankLabel label = assign_rank_label(p, gt[v], cfg.iou_pos, cfg.iou_neg);
      if (label == RankLabel::kIgnore) continue;
      out.push_back({build_context_pair(videos[v], p, cfg.samples, cfg.scale_factor),
                     label == RankLabel::kPositive ? 1 : 0});
    }
  }
  return out;
}

Batch make_ranker_batch(std::span<const int> labels, const RankerConfig& cfg, std::mt19937_64& rng) {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? positives : negatives).push_back(i);
  if (positives.empty()) throw Error(ErrorCode::kNoPositives, "no positive proposals to train on");
  if (negatives.empty()) throw Error(ErrorCode::kNoNegatives, "no negative proposals to train on");

  const auto n_pos = static_cast<std::size_t>(std::lround(cfg.batch_size * cfg.pos_frac));
  const auto n_neg = static_cast<std::size_t>(cfg.batch_size) - n_pos;
  Batch batch;
  batch.indices = draw_from_pool(std::move(positives), n_pos, rng);
  const auto neg = draw_from_pool(std::move(negatives), n_neg, rng);
  batch.indices.insert(batch.indices.end(), neg.begin(), neg.end());
  batch.labels.assign(n_pos, 1);
  batch.labels.insert(batch.labels.end(), n_neg, 0);
  return batch;
}

Batch make_ranker_batch(std::span<const int> labels, const RankerConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return make_ranker_batch(labels, cfg, rng);
}

Ranker::Ranker(const RankerConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      conv_inner_(cfg.feature_dim, cfg.conv_channels),
      conv_outer_(cfg.share_conv ? 0 : cfg.feature_dim, cfg.share_conv ? 0 : cfg.conv_channels),
      fc_hidden_(cfg.concat_width(), cfg.hidden),
      fc_out_(cfg.hidden, 2) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  conv_inner_.init(rng);
  if (!cfg_.share_conv) conv_outer_.init(rng);
  fc_hidden_.init(rng);
  fc_out_.init(rng);
}

void Ranker::zero_output_layer() {
  fc_out_.weight.value.setZero();
  fc_out_.bias.value.setZero();
}

namespace {

void check_pair_shapes(const RankerConfig& cfg, const SequenceBatch<double>& inner,
                       const SequenceBatch<double>& outer) {
  nn::require_shape(inner.batch == outer.batch, "ranker: inner and outer batch sizes differ");
  nn::require_shape(inner.length == cfg.samples && outer.length == cfg.samples,
                    "ranker: expected " + std::to_string(cfg.samples) + " samples per scale");
  nn::require_shape(inner.channels() == cfg.feature_dim && outer.channels() == cfg.feature_dim,
                    "ranker: expected feature dimension " + std::to_string(cfg.feature_dim));
}

}  // namespace

Matrix<double> Ranker::logits(const SequenceBatch<double>& inner,
                              const SequenceBatch<double>& outer) const {
  check_pair_shapes(cfg_, inner, outer);
  auto branch = [this](const nn::TemporalConv<double>& conv, const SequenceBatch<double>& x) {
    SequenceBatch<double> h = conv.apply(x);
    h.values = nn::Relu<double>::apply(h.values);
    return pool_inner_.apply(h).flattened();
  };
  const Matrix<double> a = branch(conv_inner_, inner);
  const Matrix<double> b = branch(outer_conv(), outer);
  Matrix<double> concat(a.rows(), a.cols() + b.cols());
  concat << a, b;
  Matrix<double> hidden = fc_hidden_.apply(concat);
  if (cfg_.relu_after_hidden) hidden = nn::Relu<double>::apply(hidden);
  return fc_out_.apply(hidden);
}

Matrix<double> Ranker::predict(const SequenceBatch<double>& inner,
                               const SequenceBatch<double>& outer) const {
  return nn::softmax_rows<double>(logits(inner, outer));
}

double Ranker::score(const ContextPair& pair) const {
  return predict(SequenceBatch<double>::single(pair.inner), SequenceBatch<double>::single(pair.outer))(0, 1);
}

Ranker::StepResult Ranker::accumulate_gradients(const SequenceBatch<double>& inner,
                                                const SequenceBatch<double>& outer,
                                                std::span<const int> labels) {
  check_pair_shapes(cfg_, inner, outer);
  const Index pooled_len = cfg_.samples - 6;
  const Index channels = cfg_.conv_channels;

  // Branches run through separate layer instances so each keeps its own forward cache.
  // With shared weights the outer branch borrows the inner parameters and its gradient
  // is folded back after the backward pass.
  nn::TemporalConv<double> shared_outer;
  nn::TemporalConv<double>* outer_conv_ptr = &conv_outer_;
  if (cfg_.share_conv) {
    shared_outer = conv_inner_;
    shared_outer.weight.zero_grad();
    shared_outer.bias.zero_grad();
    outer_conv_ptr = &shared_outer;
  }

  SequenceBatch<double> hi = conv_inner_.forward(inner);
  hi.values = relu_inner_.forward(hi.values);
  const Matrix<double> fa = pool_inner_.forward(hi).flattened();

  SequenceBatch<double> ho = outer_conv_ptr->forward(outer);
  ho.values = relu_outer_.forward(ho.values);
  const Matrix<double> fb = pool_outer_.forward(ho).flattened();

  Matrix<double> concat(fa.rows(), fa.cols() + fb.cols());
  concat << fa, fb;
  Matrix<double> hidden = fc_hidden_.forward(concat);
  if (cfg_.relu_after_hidden) hidden = relu_hidden_.forward(hidden);
  const Matrix<double> out = fc_out_.forward(hidden);
  const auto loss = nn::softmax_xent_batch<double>(out, labels);

  Matrix<double> g = fc_out_.backward(loss.grad);
  if (cfg_.relu_after_hidden) g = relu_hidden_.backward(g);
  const Matrix<double> gc = fc_hidden_.backward(g);
  const Index half = fa.cols();

  auto back_branch = [&](nn::TemporalConv<double>& conv, nn::Relu<double>& relu,
                         nn::AvgPool3<double>& pool, const Matrix<double>& gflat) {
    SequenceBatch<double> gp =
        pool.backward(SequenceBatch<double>::unflatten(gflat, pooled_len, channels));
    gp.values = relu.backward(gp.values);
    conv.backward(gp);
  };
  back_branch(conv_inner_, relu_inner_, pool_inner_, gc.leftCols(half));
  back_branch(*outer_conv_ptr, relu_outer_, pool_outer_, gc.rightCols(half));
  if (cfg_.share_conv) {
    conv_inner_.weight.grad += shared_outer.weight.grad;
    conv_inner_.bias.grad += shared_outer.bias.grad;
  }

  std::size_t correct = 0;
  for (Index r = 0; r < loss.probs.rows(); ++r) {
    const int predicted = loss.probs(r, 1) > loss.probs(r, 0) ? 1 : 0;
    if (predicted == labels[static_cast<std::size_t>(r)]) ++correct;
  }
  return {loss.loss, static_cast<double>(correct) / static_cast<double>(labels.size())};
}

std::vector<nn::Parameter<double>*> Ranker::parameters() {
  std::vector<nn::Parameter<double>*> out{&conv_inner_.weight, &conv_inner_.bias};
  if (!cfg_.share_conv) {
    out.push_back(&conv_outer_.weight);
    out.push_back(&conv_outer_.bias);
  }
  for (auto* p : {&fc_hidden_.weight, &fc_hidden_.bias, &fc_out_.weight, &fc_out_.bias}) {
    out.push_back(p);
  }
  return out;
}

std::vector<const nn::Parameter<double>*> Ranker::parameters() const {
  std::vector<const nn::Parameter<double>*> out{&conv_inner_.weight, &conv_inner_.bias};
  if (!cfg_.share_conv) {
    out.push_back(&conv_outer_.weight);
    out.push_back(&conv_outer_.bias);
  }
  for (const auto* p : {&fc_hidden_.weight, &fc_hidden_.bias, &fc_out_.weight, &fc_out_.bias}) {
    out.push_back(p);
  }
  return out;
}

Ranker::StepResult Ranker::train_step(const SequenceBatch<double>& inner,
                                      const SequenceBatch<double>& outer,
                                      std::span<const int> labels) {
  const auto params = parameters();
  nn::zero_grads(params);
  const StepResult r = accumulate_gradients(inner, outer, labels);
  nn::sgd_step(params, cfg_.optimizer);
  return r;
}

nn::Checkpoint Ranker::to_checkpoint() const {
  nlohmann::ordered_json meta;
  meta["kind"] = "ranker";
  meta["samples"] = cfg_.samples;
  meta["feature_dim"] = cfg_.feature_dim;
  meta["conv_channels"] = cfg_.conv_channels;
  meta["hidden"] = cfg_.hidden;
  meta["scale_factor"] = cfg_.scale_factor;
  meta["iou_pos"] = cfg_.iou_pos;
  meta["iou_neg"] = cfg_.iou_neg;
  meta["share_conv"] = cfg_.share_conv;
  meta["relu_after_hidden"] = cfg_.relu_after_hidden;

  nn::Checkpoint ckpt;
  ckpt.metadata = meta.dump();
  for (const auto* p : parameters()) ckpt.tensors.push_back(p->value);
  return ckpt;
}

Ranker Ranker::from_checkpoint(const nn::Checkpoint& ckpt) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(ckpt.metadata);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("checkpoint metadata: ") + e.what());
  }
  if (meta.value("kind", "") != "ranker") {
    throw Error(ErrorCode::kValidationError, "checkpoint does not hold a ranker");
  }
  RankerConfig cfg;
  try {
    cfg.samples = meta.at("samples").get<int>();
    cfg.feature_dim = meta.at("feature_dim").get<Index>();
    cfg.conv_channels = meta.at("conv_channels").get<int>();
    cfg.hidden = meta.at("hidden").get<int>();
    cfg.scale_factor = meta.at("scale_factor").get<double>();
    cfg.iou_pos = meta.at("iou_pos").get<double>();
    cfg.iou_neg = meta.at("iou_neg").get<double>();
    cfg.share_conv = meta.at("share_conv").get<bool>();
    cfg.relu_after_hidden = meta.at("relu_after_hidden").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("ranker checkpoint metadata: ") + e.what());
  }

  Ranker model(cfg, 0);
  auto params = model.parameters();
  if (params.size() != ckpt.tensors.size()) {
    throw Error(ErrorCode::kValidationError, "ranker checkpoint has " +
                                                 std::to_string(ckpt.tensors.size()) +
                                                 " tensors, expected " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = ckpt.tensors[i];
    if (t.rows() != params[i]->value.rows() || t.cols() != params[i]->value.cols()) {
      throw Error(ErrorCode::kValidationError, "ranker checkpoint tensor " + std::to_string(i) +
                                                   " has the wrong shape");
    }
    params[i]->value = t;
  }
  return model;
}

std::pair<SequenceBatch<double>, SequenceBatch<double>> stack_pairs(
    std::span<const RankerExample> examples, std::span<const std::size_t> indices) {
  if (indices.empty()) return {};
  const Index n = examples[indices[0]].pair.inner.rows();
  const Index d = examples[indices[0]].pair.inner.cols();
  const auto count = static_cast<Index>(indices.size());
  SequenceBatch<double> inner(count, n, d);
  SequenceBatch<double> outer(count, n, d);
  for (Index b = 0; b < count; ++b) {
    const auto& pair = examples[indices[static_cast<std::size_t>(b)]].pair;
    nn::require_shape(pair.inner.rows() == n && pair.inner.cols() == d &&
                          pair.outer.rows() == n && pair.outer.cols() == d,
                      "stack_pairs: examples disagree on shape");
    inner.sequence(b) = pair.inner;
    outer.sequence(b) = pair.outer;
  }
  return {std::move(inner), std::move(outer)};
}

Ranker train_ranker(std::span<const RankerExample> examples, const RankerConfig& cfg,
                    int iterations, std::uint64_t seed, TrainLog* log) {
  Ranker model(cfg, seed);
  if (iterations <= 0) return model;

  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) labels.push_back(e.label);

  std::mt19937_64 batch_rng(seed ^ 0x9E3779B97F4A7C15ull);
  for (int it = 0; it < iterations; ++it) {
    Batch batch = make_ranker_batch(labels, cfg, batch_rng);
    const auto [inner, outer] = stack_pairs(examples, batch.indices);
    const auto step = model.train_step(inner, outer, batch.labels);
    if (log != nullptr) {
      log->loss.push_back(step.loss);
      log->accuracy.push_back(step.accuracy);
      if (log->keep_batches) log->batches.push_back(std::move(batch));
    }
  }
  return model;
}

bool ranked_before(const Proposal& a, const Proposal& b) {
  const double sa = a.score.value_or(0.0);
  const double sb = b.score.value_or(0.0);
  if (sa != sb) return sa > sb;
  if (a.interval.begin != b.interval.begin) return a.interval.begin < b.interval.begin;
  return a.scale < b.scale;
}

std::vector<Proposal> rank_proposals(const FeatureSequence& fs, std::span<const Proposal> anchors,
                                     const Ranker& model) {
  const RankerConfig& cfg = model.config();
  std::vector<Proposal> out(anchors.begin(), anchors.end());
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < out.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, out.size() - start);
    SequenceBatch<double> inner(static_cast<Index>(count), cfg.samples, fs.dim());
    SequenceBatch<double> outer(static_cast<Index>(count), cfg.samples, fs.dim());
    for (std::size_t i = 0; i < count; ++i) {
      const auto pair = build_context_pair(fs, out[start + i], cfg.samples, cfg.scale_factor);
      inner.sequence(static_cast<Index>(i)) = pair.inner;
      outer.sequence(static_cast<Index>(i)) = pair.outer;
    }
    const Matrix<double> probs = model.predict(inner, outer);
    for (std::size_t i = 0; i < count; ++i) out[start + i].score = probs(static_cast<Index>(i), 1);
  }
  std::stable_sort(out.begin(), out.end(), ranked_before);
  return out;
}

}  // namespace tcn
