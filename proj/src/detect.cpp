#include "tcn/detect.hpp"

#include <algorithm>
#include <map>

namespace tcn {

void DetectConfig::validate() const {
  if (top_k < 1) throw Error(ErrorCode::kInvalidConfig, "top_k must be >= 1");
  if (!(nms_threshold > 0.0 && nms_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "NMS threshold must lie in (0, 1)");
  }
}

std::vector<Proposal> nms(std::span<const Proposal> ranked, double threshold) {
  std::vector<bool> suppressed(ranked.size(), false);
  std::vector<Proposal> kept;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (suppressed[i]) continue;
    kept.push_back(ranked[i]);
    for (std::size_t j = i + 1; j < ranked.size(); ++j) {
      if (!suppressed[j] && iou(ranked[i].interval, ranked[j].interval) > threshold) {
        suppressed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<Detection> nms_detections(std::span<const Detection> detections, double threshold) {
  std::map<int, std::vector<Detection>> per_class;
  for (const auto& d : detections) per_class[d.class_id].push_back(d);

  std::vector<Detection> out;
  for (auto& [cls, dets] : per_class) {
    std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.interval.begin < b.interval.begin;
    });
    std::vector<bool> suppressed(dets.size(), false);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (suppressed[i]) continue;
      out.push_back(dets[i]);
      for (std::size_t j = i + 1; j < dets.size(); ++j) {
        if (iou(dets[i].interval, dets[j].interval) > threshold) suppressed[j] = true;
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  return out;
}

namespace {

std::optional<Detection> classify_survivor(const FeatureSequence& fs, const Proposal& p,
                                           const Classifier& classifier, const DetectConfig& cfg) {
  const nn::Vector<double> probs = classifier.classify(fs, p.interval);
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  if (best == 0) return std::nullopt;
  double score = probs(best);
  if (cfg.combination == ScoreCombination::kProduct) score *= p.score.value_or(1.0);
  return Detection{fs.video_id, p.interval, static_cast<int>(best), score};
}

}  // namespace

std::vector<Detection> detect(const FeatureSequence& fs, std::span<const Proposal> anchors,
                              const Ranker& ranker, const Classifier& classifier,
                              const DetectConfig& cfg) {
  cfg.validate();
  if (anchors.empty()) return {};
  const std::vector<Proposal> ranked = rank_proposals(fs, anchors, ranker);

  std::vector<Detection> out;
  if (!cfg.nms_after_classification) {
    std::vector<Proposal> kept = nms(ranked, cfg.nms_threshold);
    if (kept.size() > static_cast<std::size_t>(cfg.top_k)) kept.resize(static_cast<std::size_t>(cfg.top_k));
    for (const auto& p : kept) {
      if (auto d = classify_survivor(fs, p, classifier, cfg)) out.push_back(std::move(*d));
    }
    return out;
  }

  for (const auto& p : ranked) {
    if (auto d = classify_survivor(fs, p, classifier, cfg)) out.push_back(std::move(*d));
  }
  out = nms_detections(out, cfg.nms_threshold);
  if (out.size() > static_cast<std::size_t>(cfg.top_k)) out.resize(static_cast<std::size_t>(cfg.top_k));
  return out;
}

std::vector<Detection> detect(const FeatureSequence& fs, const AnchorConfig& anchors,
                              const Ranker& ranker, const Classifier& classifier,
                              const DetectConfig& cfg) {
  const auto all = generate_anchors(anchors, fs.num_frames());
  return detect(fs, all, ranker, classifier, cfg);
}

}  // namespace tcn
