// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../support/gradcheck_cases.hpp"
#include "../support/oracles.hpp"
#include "../support/test_util.hpp"
#include "tcn/anchors.hpp"
#include "tcn/classifier.hpp"
#include "tcn/cli.hpp"
#include "tcn/data_io.hpp"
#include "tcn/detect.hpp"
#include "tcn/metrics.hpp"
#include "tcn/nn/checkpoint.hpp"
#include "tcn/ranker.hpp"

using namespace tcn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 -------------------------------------------------------------------------------------

Outcome gradient_fidelity() {
  constexpr double kTol = 1e-4;
  constexpr int kShapes = 12;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  double worst = 0.0;
  std::string worst_layer;
  int checks = 0;
  for (int i = 0; i < kShapes; ++i) {
    for (const auto& r : {test::gradcheck_conv(rng), test::gradcheck_pool(rng), test::gradcheck_linear(rng),
                          test::gradcheck_softmax_xent(rng)}) {
      ++checks;
      if (r.max_rel_error >= worst) {
        worst = r.max_rel_error;
        worst_layer = r.layer + " " + r.shape;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst < kTol && secs < 60.0,
          fmt("%d layer/shape checks (4 layers x %d shapes), worst max-rel-err %.2e at %s (tol %.0e), %.1f s (limit 60 s)",
              checks, kShapes, worst, worst_layer.c_str(), kTol, secs)};
}

// 2 -------------------------------------------------------------------------------------

Outcome oracle_equivalence() {
  constexpr int kFixtures = 100;
  std::mt19937_64 rng(2);
  int nms_bad = 0, recall_bad = 0, ar_bad = 0, map_bad = 0;
  for (int f = 0; f < kFixtures; ++f) {
    const auto fx = oracle::random_metric_fixture(rng, 20);

    std::vector<Proposal> ranked;
    for (const auto& [vid, list] : fx.proposals) {
      for (const auto& iv : list) ranked.push_back({iv, 0, 1, 1.0 - 0.01 * static_cast<double>(ranked.size())});
    }
    std::vector<TemporalInterval> plain;
    for (const auto& p : ranked) plain.push_back(p.interval);
    for (double thr : {0.3, 0.45, 0.7}) {
      std::vector<TemporalInterval> kept;
      for (const auto& p : nms(ranked, thr)) kept.push_back(p.interval);
      nms_bad += kept == oracle::nms(plain, thr) ? 0 : 1;
    }
    for (int k : {1, 5, 20}) {
      for (double t : {0.5, 0.75}) {
        recall_bad += recall_at_k(fx.proposals, fx.gt, k, t) == oracle::recall_at_k(fx.proposals, fx.gt, k, t) ? 0 : 1;
      }
      ar_bad += average_recall(fx.proposals, fx.gt, k) == oracle::average_recall(fx.proposals, fx.gt, k) ? 0 : 1;
    }
    for (double t : {0.5, 0.75, 0.95}) {
      map_bad += mean_average_precision(fx.detections, fx.gt, t).map_value == oracle::mean_ap(fx.detections, fx.gt, t) ? 0 : 1;
    }
  }
  const std::vector<GroundTruthAnnotation> gt{{"a", {{{10, 20}, 1}}}};
  const std::vector<Detection> hand{{"a", {10, 20}, 1, 0.9}, {"a", {50, 60}, 1, 0.8}};
  const double hand_ap = mean_average_precision(hand, gt, 0.5).map_value;
  const bool ok = nms_bad + recall_bad + ar_bad + map_bad == 0 && hand_ap == 1.0;
  return {ok, fmt("%d random fixtures (<=20 intervals), exact mismatches: nms %d, recall@k %d, AR %d, mAP %d; "
                  "hand fixture AP = %.17g (expected exactly 1)",
                  kFixtures, nms_bad, recall_bad, ar_bad, map_bad, hand_ap)};
}

// 3 -------------------------------------------------------------------------------------

Outcome bilinear_invariants() {
  std::mt19937_64 rng(3);
  int asym = 0, neg_diag = 0;
  double norm_err = 0.0, scale_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = test::pick(rng, 1, 10);
    const nn::Matrix<double> z = test::random_matrix(test::pick(rng, 1, 40), d, rng);
    const auto v = bilinear_pool(z);
    const nn::Matrix<double> g = Eigen::Map<const nn::Matrix<double>>(v.data(), d, d);
    asym += g == g.transpose() ? 0 : 1;
    neg_diag += (g.diagonal().array() >= 0.0).all() ? 0 : 1;

    nn::Vector<double> x = test::random_matrix(test::pick(rng, 1, 100), 1, rng).col(0);
    x *= std::pow(10.0, static_cast<double>(test::pick(rng, -8, 8)));
    if (x.isZero(0.0)) continue;
    norm_err = std::max(norm_err, std::abs(signed_sqrt_l2(x).norm() - 1.0));
  }

  for (int trial = 0; trial < 20; ++trial) {
    ClassifierConfig cfg;
    cfg.feature_dim = test::pick(rng, 2, 8);
    cfg.num_classes = static_cast<int>(test::pick(rng, 1, 5));
    const Classifier c(cfg, rng());
    const nn::Matrix<double> z = test::random_matrix(test::pick(rng, 1, 50), cfg.feature_dim, rng);
    const auto encode = [](const nn::Matrix<double>& m) { return signed_sqrt_l2(bilinear_pool(m)).transpose().eval(); };
    const nn::Matrix<double> base = c.predict(encode(z));
    for (double s : {1e-4, 0.3, 7.0, 1e4}) {
      scale_err = std::max(scale_err, (c.predict(encode(s * z)) - base).cwiseAbs().maxCoeff());
    }
    FeatureSequence fs{"v", test::random_matrix(60, cfg.feature_dim, rng).cast<float>()};
    for (float s : {0.125f, 4.0f, 4096.0f}) {
      FeatureSequence scaled{"v", fs.values * s};
      scale_err = std::max(scale_err, (c.classify(scaled, {5, 50}) - c.classify(fs, {5, 50})).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = asym == 0 && neg_diag == 0 && norm_err < 1e-12 && scale_err < 1e-9;
  return {ok, fmt("200 random Z: asymmetric %d, negative diagonal %d; signed_sqrt_l2 worst |norm-1| %.2e (tol 1e-12); "
                  "classifier worst output change under positive scaling %.2e (tol 1e-9)",
                  asym, neg_diag, norm_err, scale_err)};
}

// 4 -------------------------------------------------------------------------------------

Outcome anchor_law() {
  int cases = 0, count_bad = 0, enum_bad = 0;
  for (Frame L : {2, 4, 8, 16, 32, 64}) {
    for (int K : {1, 2, 3, 4, 5}) {
      for (Frame T : {1, 2, 3, 15, 16, 17, 64, 100, 255, 1000}) {
        ++cases;
        const auto a = generate_anchors({L, K}, T);
        const auto M = static_cast<std::size_t>((T - 1) / (L / 2) + 1);
        count_bad += a.size() == M * static_cast<std::size_t>(K) ? 0 : 1;
        std::vector<TemporalInterval> iv;
        for (const auto& p : a) iv.push_back(p.interval);
        enum_bad += iv == oracle::anchors(L, K, T) ? 0 : 1;
      }
    }
  }

  SynthConfig sc;
  sc.num_videos = 200;
  sc.seed = 4;
  const auto data = generate_synthetic(sc);
  const auto gt = data.manifest.ground_truth();
  int mono_bad = 0, thresholds = 0;
  std::vector<double> at_half;
  for (double thr = 0.05; thr < 1.0; thr += 0.05) {
    ++thresholds;
    double prev = -1.0;
    for (int K = 1; K <= 6; ++K) {
      double hit = 0.0, total = 0.0;
      for (std::size_t v = 0; v < gt.size(); ++v) {
        const auto a = generate_anchors({16, K}, data.features[v].num_frames());
        hit += pyramid_coverage_recall(a, gt[v], thr) * static_cast<double>(gt[v].intervals.size());
        total += static_cast<double>(gt[v].intervals.size());
      }
      const double r = hit / total;
      mono_bad += r + 1e-12 >= prev ? 0 : 1;
      prev = r;
      if (std::abs(thr - 0.5) < 1e-9) at_half.push_back(r);
    }
  }
  const bool ok = count_bad == 0 && enum_bad == 0 && mono_bad == 0;
  return {ok, fmt("%d (L,K,T) cases: count != M*K %d, differs from enumeration %d; coverage recall over K=1..6 at "
                  "%d thresholds: %d decreases (recall@0.5 K=1..6: %.3f %.3f %.3f %.3f %.3f %.3f)",
                  cases, count_bad, enum_bad, thresholds, mono_bad, at_half[0], at_half[1], at_half[2], at_half[3],
                  at_half[4], at_half[5])};
}

// 5, 6, 8 share the synthetic benchmark ---------------------------------------------------

struct Benchmark {
  SynthConfig train_cfg;
  SyntheticDataset train;
  SyntheticDataset test;
  AnchorConfig anchors{16, 4};
  static constexpr int kRankerIterations = 150;
  static constexpr int kClassifierIterations = 5000;

  struct Arm {
    double scale_factor = 0;
    TrainLog log;
    std::vector<int> labels;
    double ar5 = 0;
    double map50 = 0;
  };
  Arm no_context, context;
  TrainLog classifier_log;
  std::vector<int> classifier_labels;
  double classifier_batch_accuracy = 0;
  double seconds = 0;
};

Benchmark& benchmark() {
  static Benchmark b = [] {
    const auto t0 = std::chrono::steady_clock::now();
    Benchmark bm;
    bm.train_cfg.num_videos = 200;
    bm.train_cfg.duration_choices = {32, 64, 128};
    bm.train_cfg.boundary_signal = true;
    bm.train_cfg.seed = 7;
    SynthConfig test_cfg = bm.train_cfg;
    test_cfg.num_videos = 100;
    test_cfg.seed = 8;
    bm.train = generate_synthetic(bm.train_cfg);
    bm.test = generate_synthetic(test_cfg);
    const auto train_gt = bm.train.manifest.ground_truth();
    const auto test_gt = bm.test.manifest.ground_truth();

    ClassifierConfig cc;
    cc.feature_dim = bm.train_cfg.dim;
    cc.num_classes = bm.train_cfg.num_classes;
    const auto cex = build_classifier_examples(bm.train.features, train_gt, bm.anchors, cc);
    for (const auto& e : cex) bm.classifier_labels.push_back(e.label);
    bm.classifier_log.keep_batches = true;
    const Classifier classifier = train_classifier(cex, cc, Benchmark::kClassifierIterations, 3, &bm.classifier_log);

    // Accuracy on a fresh batch drawn with the training recipe.
    std::mt19937_64 rng(99);
    const Batch probe = make_classifier_batch(bm.classifier_labels, cc, rng);
    nn::Matrix<double> enc(static_cast<Eigen::Index>(probe.size()), cex.front().features.size());
    for (std::size_t i = 0; i < probe.size(); ++i) enc.row(static_cast<Eigen::Index>(i)) = cex[probe.indices[i]].features.transpose();
    const nn::Matrix<double> probs = classifier.predict(enc);
    int correct = 0;
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
      Eigen::Index best = 0;
      probs.row(i).maxCoeff(&best);
      correct += best == probe.labels[static_cast<std::size_t>(i)] ? 1 : 0;
    }
    bm.classifier_batch_accuracy = static_cast<double>(correct) / static_cast<double>(probs.rows());

    DetectConfig dc;
    dc.combination = ScoreCombination::kProduct;
    for (auto* arm : {&bm.no_context, &bm.context}) {
      arm->scale_factor = arm == &bm.no_context ? 1.0 : 2.0;
      RankerConfig rc;
      rc.feature_dim = bm.train_cfg.dim;
      rc.scale_factor = arm->scale_factor;
      const auto ex = build_ranker_examples(bm.train.features, train_gt, bm.anchors, rc);
      for (const auto& e : ex) arm->labels.push_back(e.label);
      arm->log.keep_batches = true;
      const Ranker ranker = train_ranker(ex, rc, Benchmark::kRankerIterations, 11, &arm->log);

      RankedProposals proposals;
      std::vector<Detection> detections;
      for (const auto& f : bm.test.features) {
        const auto anchors = generate_anchors(bm.anchors, f.num_frames());
        for (const auto& p : nms(rank_proposals(f, anchors, ranker), dc.nms_threshold)) {
          proposals[f.video_id].push_back(p.interval);
        }
        const auto d = detect(f, anchors, ranker, classifier, dc);
        detections.insert(detections.end(), d.begin(), d.end());
      }
      arm->ar5 = average_recall(proposals, test_gt, 5);
      arm->map50 = mean_average_precision(detections, test_gt, 0.5).map_value;
    }
    bm.seconds = seconds_since(t0);
    return bm;
  }();
  return b;
}

Outcome context_vs_no_context() {
  constexpr double kGap = 0.10;
  const Benchmark& b = benchmark();
  const double ar_gap = b.context.ar5 - b.no_context.ar5;
  const double map_gap = b.context.map50 - b.no_context.map50;
  const bool ok = ar_gap >= kGap && map_gap >= kGap && b.seconds < 600.0;
  return {ok, fmt("train %d / test %zu synthetic videos, boundary signal on; AR@5: sf=1 %.2f%%, sf=2 %.2f%% (gap %+.2f, need >= 10); "
                  "mAP@0.5 (product scores): sf=1 %.2f%%, sf=2 %.2f%% (gap %+.2f, need >= 10); %.0f s (target 600 s)",
                  b.train_cfg.num_videos, b.test.features.size(), 100 * b.no_context.ar5, 100 * b.context.ar5,
                  100 * ar_gap, 100 * b.no_context.map50, 100 * b.context.map50, 100 * map_gap, b.seconds)};
}

Outcome learnability() {
  constexpr double kRankerTarget = 0.95, kClassifierTarget = 0.90;
  constexpr int kLimit = 200;
  RankerConfig rc;
  rc.feature_dim = 8;
  const auto ex = generate_separable_pairs(4096, rc.samples, rc.feature_dim, 1.0, 6);
  TrainLog log;
  const Ranker model = train_ranker(ex, rc, kLimit, 6, &log);
  int first = -1;
  for (std::size_t i = 0; i < log.accuracy.size() && first < 0; ++i) {
    if (log.accuracy[i] >= kRankerTarget) first = static_cast<int>(i) + 1;
  }
  int correct = 0;
  for (const auto& e : ex) correct += (model.score(e.pair) > 0.5) == (e.label == 1) ? 1 : 0;
  const double full = static_cast<double>(correct) / static_cast<double>(ex.size());

  const double clf = benchmark().classifier_batch_accuracy;
  const bool ok = first > 0 && full >= kRankerTarget && clf >= kClassifierTarget;
  return {ok, fmt("ranker on separable set: batch accuracy first >= 95%% at iteration %d (limit %d), "
                  "whole-set accuracy after %d iterations %.2f%%; classifier on class-coded synthetic set: %.2f%% "
                  "on a recipe batch (need >= 90%%)",
                  first, kLimit, kLimit, 100 * full, 100 * clf)};
}

// 7 -------------------------------------------------------------------------------------

struct ChainRun {
  std::string printed;
  std::string ranker_bytes;
  std::string classifier_bytes;
  int status = 0;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ChainRun run_chain(const fs::path& root, const std::string& jobs) {
  ChainRun r;
  std::ostringstream out, err;
  const std::string data = (root / "data").string(), models = (root / "models").string();
  const std::string manifest = data + "/manifest.json", features = data + "/features";
  const std::vector<std::vector<std::string>> steps{
      {"synth", "--seed", "21", "--videos", "30", "--duration-choices", "32,64", "--out", data},
      {"--jobs", jobs, "train-ranker", "--manifest", manifest, "--features", features, "--conv-channels", "16",
       "--hidden", "64", "--batch-size", "128", "--iterations", "25", "--seed", "5", "--out", models},
      {"train-classifier", "--manifest", manifest, "--features", features, "--batch-size", "256",
       "--background-per-batch", "16", "--iterations", "100", "--seed", "6", "--out", models},
      {"--jobs", jobs, "rank", "--manifest", manifest, "--features", features, "--ranker", models + "/ranker.tcnw",
       "--out", (root / "out").string()},
      {"--jobs", jobs, "detect", "--manifest", manifest, "--features", features, "--ranker",
       models + "/ranker.tcnw", "--classifier", models + "/classifier.tcnw", "--out", (root / "out").string()},
  };
  for (const auto& s : steps) {
    std::ostringstream sink;
    r.status |= cli::run(s, sink, err);
  }
  r.status |= cli::run({"eval", "--manifest", manifest, "--proposals", (root / "out/proposals.jsonl").string(),
                        "--detections", (root / "out/detections.jsonl").string(), "--out", (root / "eval").string()},
                       out, err);
  r.printed = out.str();
  r.ranker_bytes = slurp(root / "models/ranker.tcnw");
  r.classifier_bytes = slurp(root / "models/classifier.tcnw");
  return r;
}

Outcome determinism() {
  test::TempDir a("accept_a"), b("accept_b");
  const ChainRun x = run_chain(a.path(), "1");
  const ChainRun y = run_chain(b.path(), "3");
  const bool ok = x.status == 0 && y.status == 0 && !x.ranker_bytes.empty() && x.ranker_bytes == y.ranker_bytes &&
                  x.classifier_bytes == y.classifier_bytes && !x.printed.empty() && x.printed == y.printed;
  return {ok, fmt("synth->train-ranker->train-classifier->rank->detect->eval twice (1 vs 3 worker threads): exit "
                  "statuses %d/%d; ranker checkpoint %s (%zu bytes), classifier checkpoint %s (%zu bytes), printed "
                  "metrics %s",
                  x.status, y.status, x.ranker_bytes == y.ranker_bytes ? "identical" : "DIFFERENT",
                  x.ranker_bytes.size(), x.classifier_bytes == y.classifier_bytes ? "identical" : "DIFFERENT",
                  x.classifier_bytes.size(), x.printed == y.printed ? "identical" : "DIFFERENT")};
}

// 8 -------------------------------------------------------------------------------------

Outcome batch_contracts() {
  const Benchmark& b = benchmark();
  int ranker_batches = 0, ranker_bad = 0;
  for (const auto* arm : {&b.no_context, &b.context}) {
    for (const auto& batch : arm->log.batches) {
      ++ranker_batches;
      int pos = 0, neg = 0;
      bool consistent = batch.size() == 1024;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        consistent = consistent && arm->labels[batch.indices[i]] == batch.labels[i];
        (batch.labels[i] == 1 ? pos : neg) += 1;
      }
      ranker_bad += consistent && pos == 512 && neg == 512 ? 0 : 1;
    }
  }
  int clf_batches = 0, clf_bad = 0;
  for (const auto& batch : b.classifier_log.batches) {
    ++clf_batches;
    int bg = 0;
    bool consistent = batch.size() == 1024;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      consistent = consistent && b.classifier_labels[batch.indices[i]] == batch.labels[i];
      bg += batch.labels[i] == 0 ? 1 : 0;
    }
    clf_bad += consistent && bg == 64 ? 0 : 1;
  }
  const bool ok = ranker_batches > 0 && clf_batches > 0 && ranker_bad == 0 && clf_bad == 0;
  return {ok, fmt("%d ranker batches: %d not exactly 512 positive / 512 negative; %d classifier batches: %d without "
                  "exactly 64 background of 1024",
                  ranker_batches, ranker_bad, clf_batches, clf_bad)};
}

// 9 -------------------------------------------------------------------------------------

template <typename Read>
std::optional<ErrorCode> read_code(const std::string& bytes, Read read) {
  return test::thrown_code([&] {
    std::istringstream in(bytes);
    read(in);
  });
}

Outcome format_round_trips() {
  std::mt19937_64 rng(9);
  int feature_bad = 0, ckpt_bad = 0, error_bad = 0, error_cases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    FeatureSequence fs{"f", test::random_matrix(test::pick(rng, 1, 300), test::pick(rng, 1, 64), rng).cast<float>()};
    fs.values(0, 0) = -0.0f;
    std::stringstream buf;
    write_features(buf, fs);
    const std::string bytes = buf.str();
    const FeatureSequence back = read_features(buf, "f");
    std::stringstream again;
    write_features(again, back);
    feature_bad += back.values.rows() == fs.values.rows() && back.values.cols() == fs.values.cols() &&
                           std::memcmp(back.values.data(), fs.values.data(), sizeof(float) * static_cast<std::size_t>(fs.values.size())) == 0 &&
                           again.str() == bytes
                       ? 0
                       : 1;
  }

  RankerConfig rc;
  rc.feature_dim = 6;
  rc.conv_channels = 8;
  rc.hidden = 20;
  ClassifierConfig cc;
  cc.feature_dim = 6;
  cc.num_classes = 4;
  const std::vector<nn::Checkpoint> models{Ranker(rc, 1).to_checkpoint(), Classifier(cc, 2).to_checkpoint()};
  for (const auto& c : models) {
    std::stringstream buf;
    nn::write_checkpoint(buf, c);
    const std::string bytes = buf.str();
    const nn::Checkpoint back = nn::read_checkpoint(buf);
    std::stringstream again;
    nn::write_checkpoint(again, back);
    ckpt_bad += back == c && again.str() == bytes ? 0 : 1;
  }
  ckpt_bad += Ranker::from_checkpoint(models[0]).to_checkpoint() == models[0] ? 0 : 1;
  ckpt_bad += Classifier::from_checkpoint(models[1]).to_checkpoint() == models[1] ? 0 : 1;

  auto expect = [&](const std::optional<ErrorCode>& got, ErrorCode want) {
    ++error_cases;
    error_bad += got == want ? 0 : 1;
  };
  std::stringstream fbuf;
  write_features(fbuf, FeatureSequence{"f", RowMatrix<float>::Ones(5, 3)});
  const std::string feat = fbuf.str();
  auto read_f = [](std::istream& in) { read_features(in, "f"); };
  std::string m = feat;
  m[0] = 'X';
  expect(read_code(m, read_f), ErrorCode::kBadMagic);
  expect(read_code(feat.substr(0, 2), read_f), ErrorCode::kTruncatedFile);
  expect(read_code(feat.substr(0, 12), read_f), ErrorCode::kTruncatedFile);
  expect(read_code(feat.substr(0, feat.size() - 1), read_f), ErrorCode::kTruncatedFile);
  m = feat;
  m[4] = 7;
  expect(read_code(m, read_f), ErrorCode::kParseError);
  m = feat;
  std::memset(m.data() + 8, 0xff, 8);
  expect(read_code(m, read_f), ErrorCode::kDimOverflow);

  std::stringstream cbuf;
  nn::write_checkpoint(cbuf, models[1]);
  const std::string ck = cbuf.str();
  auto read_c = [](std::istream& in) { nn::read_checkpoint(in); };
  m = ck;
  m[3] = 'F';
  expect(read_code(m, read_c), ErrorCode::kBadMagic);
  expect(read_code(ck.substr(0, 3), read_c), ErrorCode::kTruncatedFile);
  expect(read_code(ck.substr(0, ck.size() / 2), read_c), ErrorCode::kTruncatedFile);
  m = ck;
  m[4] = 2;
  expect(read_code(m, read_c), ErrorCode::kParseError);
  m = ck;
  std::memset(m.data() + 8, 0xff, 4);
  expect(read_code(m, read_c), ErrorCode::kDimOverflow);

  const bool ok = feature_bad == 0 && ckpt_bad == 0 && error_bad == 0;
  return {ok, fmt("50 random feature files: %d not bit-exact; ranker+classifier checkpoints: %d not bit-exact; "
                  "%d corrupted headers: %d raised the wrong error category",
                  feature_bad, ckpt_bad, error_cases, error_bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"gradient fidelity", gradient_fidelity},
      {"oracle equivalence", oracle_equivalence},
      {"bilinear / signed-sqrt invariants", bilinear_invariants},
      {"anchor law", anchor_law},
      {"context vs no context", context_vs_no_context},
      {"learnability", learnability},
      {"determinism", determinism},
      {"batch contracts", batch_contracts},
      {"format round trips", format_round_trips},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
