#pragma once

#include <span>
#include <string>
#include <vector>

#include "tcn/anchors.hpp"
#include "tcn/classifier.hpp"
#include "tcn/core.hpp"
#include "tcn/ranker.hpp"
#include "tcn/sampling.hpp"

namespace tcn {

enum class ScoreCombination {
  kClassifierOnly,  // detection score = classifier probability
  kProduct,         // classifier probability * proposal score
};

struct DetectConfig {
  int top_k = 20;
  double nms_threshold = 0.45;
  ScoreCombination combination = ScoreCombination::kClassifierOnly;
  bool nms_after_classification = false;

  void validate() const;
};

/// Greedy suppression over proposals already in ranked order: keep the first remaining,
/// drop every later one with IoU > threshold against it, repeat.
std::vector<Proposal> nms(std::span<const Proposal> ranked, double threshold);

/// Per-class greedy suppression on detections (sorted internally by descending score).
std::vector<Detection> nms_detections(std::span<const Detection> detections, double threshold);

/// anchors -> rank -> NMS -> top-K -> classify. Survivors whose most likely class is
/// background are dropped.
std::vector<Detection> detect(const FeatureSequence& fs, std::span<const Proposal> anchors,
                              const Ranker& ranker, const Classifier& classifier,
                              const DetectConfig& cfg);

std::vector<Detection> detect(const FeatureSequence& fs, const AnchorConfig& anchors,
                              const Ranker& ranker, const Classifier& classifier,
                              const DetectConfig& cfg);

}  // namespace tcn
