#include "tcn/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcn/anchors.hpp"
#include "tcn/classifier.hpp"
#include "tcn/detect.hpp"
#include "tcn/ranker.hpp"

namespace tcn::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

int exit_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kConfigError:
      return kExitUsage;
    case ErrorCode::kShapeError:
    case ErrorCode::kStateError:
      return kExitInternal;
    default:
      return kExitData;
  }
}

void write_proposals(std::ostream& out, const std::string& video_id, std::span<const Proposal> ranked) {
  for (const auto& p : ranked) {
    ordered_json j;
    j["video_id"] = video_id;
    j["begin"] = p.interval.begin;
    j["end"] = p.interval.end;
    j["score"] = p.score.value_or(0.0);
    j["position"] = p.position;
    j["scale"] = p.scale;
    out << j.dump() << '\n';
  }
}

namespace {

template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& what, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, what + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

RankedProposals read_proposals(std::istream& in) {
  RankedProposals out;
  for_each_json_line(in, "proposals", [&](const nlohmann::json& j) {
    const TemporalInterval iv{j.at("begin").get<Frame>(), j.at("end").get<Frame>()};
    if (!iv.valid()) throw Error(ErrorCode::kValidationError, "proposal with empty interval");
    out[j.at("video_id").get<std::string>()].push_back(iv);
  });
  return out;
}

void write_detections(std::ostream& out, std::span<const Detection> detections,
                      const DatasetManifest& manifest) {
  for (const auto& d : detections) {
    ordered_json j;
    j["video_id"] = d.video_id;
    j["begin"] = d.interval.begin;
    j["end"] = d.interval.end;
    j["class_id"] = d.class_id;
    j["class_name"] = manifest.label_name(d.class_id);
    j["score"] = d.score;
    out << j.dump() << '\n';
  }
}

std::vector<Detection> read_detections(std::istream& in) {
  std::vector<Detection> out;
  for_each_json_line(in, "detections", [&](const nlohmann::json& j) {
    Detection d;
    d.video_id = j.at("video_id").get<std::string>();
    d.interval = {j.at("begin").get<Frame>(), j.at("end").get<Frame>()};
    d.class_id = j.at("class_id").get<int>();
    d.score = j.at("score").get<double>();
    if (!d.interval.valid()) throw Error(ErrorCode::kValidationError, "detection with empty interval");
    out.push_back(std::move(d));
  });
  return out;
}

namespace {

struct DataArgs {
  std::string manifest;
  std::string features;
};

struct AnchorArgs {
  Frame base_length = 16;
  int scales = 4;

  AnchorConfig config() const {
    AnchorConfig cfg{base_length, scales};
    cfg.validate();
    return cfg;
  }
};

struct Options {
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
  int verbosity = 0;
  DataArgs data;
  AnchorArgs anchors;

  SynthConfig synth;
  RankerConfig ranker;
  ClassifierConfig classifier;
  DetectConfig detect;
  int iterations = 200;
  std::string ranker_path;
  std::string classifier_path;
  std::string proposals_path;
  std::string detections_path;
  bool no_nms = false;
  int top = 0;
  Frame frames = 0;
  std::string combination = "classifier_only";
};

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--manifest", o.data.manifest, "Dataset manifest (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--features", o.data.features, "Directory of <video_id>.tcnf feature files")
      ->required()
      ->check(CLI::ExistingDirectory);
}

void add_anchor_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--base-length", o.anchors.base_length, "Base window length L in frames (even)")
      ->capture_default_str();
  cmd->add_option("--scales", o.anchors.scales, "Pyramid levels K")->capture_default_str();
}

void add_out_option(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out_dir, "Output directory")->required();
}

void add_optimizer_options(CLI::App* cmd, nn::OptimizerConfig& opt) {
  cmd->add_option("--lr", opt.learning_rate, "Learning rate")->capture_default_str();
  cmd->add_option("--momentum", opt.momentum, "Momentum")->capture_default_str();
  cmd->add_option("--weight-decay", opt.weight_decay, "Weight decay")->capture_default_str();
}

void add_ranker_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--samples", o.ranker.samples, "Samples per scale n")->capture_default_str();
  cmd->add_option("--conv-channels", o.ranker.conv_channels, "Temporal conv output channels")
      ->capture_default_str();
  cmd->add_option("--hidden", o.ranker.hidden, "Hidden FC width")->capture_default_str();
  cmd->add_option("--scale-factor", o.ranker.scale_factor, "Context scale factor (1 disables context)")
      ->capture_default_str();
  cmd->add_option("--batch-size", o.ranker.batch_size, "Proposals per batch")->capture_default_str();
  cmd->add_flag("--share-conv", o.ranker.share_conv, "Share conv weights between the two scales");
  cmd->add_flag("!--no-hidden-relu", o.ranker.relu_after_hidden, "Drop the ReLU after the hidden FC");
  add_optimizer_options(cmd, o.ranker.optimizer);
}

fs::path prepare_out_dir(const Options& o) {
  const fs::path dir(o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create output directory " + dir.string());
  return dir;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct LoadedData {
  DatasetManifest manifest;
  std::vector<FeatureSequence> features;
  std::vector<GroundTruthAnnotation> gt;
};

LoadedData load_data(const Options& o) {
  LoadedData d;
  d.manifest = load_manifest(o.data.manifest);
  d.features = load_dataset_features(d.manifest, o.data.features);
  d.gt = d.manifest.ground_truth();
  return d;
}

Eigen::Index common_dim(const std::vector<FeatureSequence>& features) {
  if (features.empty()) throw Error(ErrorCode::kValidationError, "dataset has no videos");
  const auto dim = features.front().dim();
  for (const auto& f : features) {
    if (f.dim() != dim) {
      throw Error(ErrorCode::kValidationError, "feature dimension differs across videos ('" +
                                                   f.video_id + "')");
    }
  }
  return dim;
}

void log_training(std::ostream& out, const Options& o, const char* what, const TrainLog& log) {
  if (log.loss.empty()) return;
  const std::size_t every = o.verbosity > 0 ? 1 : std::max<std::size_t>(1, log.loss.size() / 10);
  for (std::size_t i = 0; i < log.loss.size(); ++i) {
    if (i % every == 0 || i + 1 == log.loss.size()) {
      out << what << " iter " << i << " loss " << std::setprecision(6) << log.loss[i] << " acc "
          << log.accuracy[i] << '\n';
    }
  }
}

int cmd_synth(const Options& o, std::ostream& out) {
  SynthConfig cfg = o.synth;
  cfg.seed = o.seed;
  const auto data = generate_synthetic(cfg);
  const fs::path dir = prepare_out_dir(o);
  write_dataset(dir, data);
  out << "wrote " << data.features.size() << " videos to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_generate_anchors(const Options& o, std::ostream& out) {
  const auto anchors = generate_anchors(o.anchors.config(), o.frames);
  std::ostringstream text;
  text << "# position scale begin end\n";
  for (const auto& a : anchors) {
    text << a.position << ' ' << a.scale << ' ' << a.interval.begin << ' ' << a.interval.end << '\n';
  }
  if (o.out_dir.empty()) {
    out << text.str();
  } else {
    std::ofstream f(prepare_out_dir(o) / "anchors.txt");
    f << text.str();
    out << "wrote " << anchors.size() << " anchors\n";
  }
  return kExitOk;
}

int cmd_train_ranker(const Options& o, std::ostream& out) {
  const auto data = load_data(o);
  RankerConfig cfg = o.ranker;
  cfg.feature_dim = common_dim(data.features);
  cfg.validate();
  const auto examples = build_ranker_examples(data.features, data.gt, o.anchors.config(), cfg);
  TrainLog log;
  const Ranker model = train_ranker(examples, cfg, o.iterations, o.seed, &log);
  const fs::path dir = prepare_out_dir(o);
  nn::write_checkpoint(dir / "ranker.tcnw", model.to_checkpoint());
  log_training(out, o, "ranker", log);
  out << "wrote " << (dir / "ranker.tcnw").string() << '\n';
  return kExitOk;
}

int cmd_train_classifier(const Options& o, std::ostream& out) {
  const auto data = load_data(o);
  ClassifierConfig cfg = o.classifier;
  cfg.feature_dim = common_dim(data.features);
  cfg.num_classes = static_cast<int>(data.manifest.label_names.size());
  cfg.validate();
  const auto examples = build_classifier_examples(data.features, data.gt, o.anchors.config(), cfg);
  TrainLog log;
  const Classifier model = train_classifier(examples, cfg, o.iterations, o.seed, &log);
  const fs::path dir = prepare_out_dir(o);
  nn::write_checkpoint(dir / "classifier.tcnw", model.to_checkpoint());
  log_training(out, o, "classifier", log);
  out << "wrote " << (dir / "classifier.tcnw").string() << '\n';
  return kExitOk;
}

int cmd_rank(const Options& o, std::ostream& out) {
  const auto data = load_data(o);
  const Ranker model = Ranker::from_checkpoint(nn::read_checkpoint(fs::path(o.ranker_path)));
  const AnchorConfig anchors = o.anchors.config();
  const double thr = o.detect.nms_threshold;

  std::vector<std::vector<Proposal>> ranked(data.features.size());
  parallel_for(data.features.size(), o.jobs, [&](std::size_t i) {
    const auto& f = data.features[i];
    auto r = rank_proposals(f, generate_anchors(anchors, f.num_frames()), model);
    if (!o.no_nms) r = nms(r, thr);
    if (o.top > 0 && r.size() > static_cast<std::size_t>(o.top)) r.resize(static_cast<std::size_t>(o.top));
    ranked[i] = std::move(r);
  });

  const fs::path dir = prepare_out_dir(o);
  std::ofstream file(dir / "proposals.jsonl", std::ios::trunc);
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    write_proposals(file, data.features[i].video_id, ranked[i]);
    total += ranked[i].size();
  }
  out << "wrote " << total << " proposals to " << (dir / "proposals.jsonl").string() << '\n';
  return kExitOk;
}

int cmd_detect(const Options& o, std::ostream& out) {
  const auto data = load_data(o);
  const Ranker ranker = Ranker::from_checkpoint(nn::read_checkpoint(fs::path(o.ranker_path)));
  const Classifier classifier =
      Classifier::from_checkpoint(nn::read_checkpoint(fs::path(o.classifier_path)));
  DetectConfig cfg = o.detect;
  if (o.combination == "product") {
    cfg.combination = ScoreCombination::kProduct;
  } else if (o.combination == "classifier_only") {
    cfg.combination = ScoreCombination::kClassifierOnly;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown score combination '" + o.combination + "'");
  }
  cfg.validate();
  const AnchorConfig anchors = o.anchors.config();

  std::vector<std::vector<Detection>> per_video(data.features.size());
  parallel_for(data.features.size(), o.jobs, [&](std::size_t i) {
    per_video[i] = detect(data.features[i], anchors, ranker, classifier, cfg);
  });

  const fs::path dir = prepare_out_dir(o);
  std::ofstream file(dir / "detections.jsonl", std::ios::trunc);
  std::size_t total = 0;
  for (const auto& dets : per_video) {
    write_detections(file, dets, data.manifest);
    total += dets.size();
  }
  out << "wrote " << total << " detections to " << (dir / "detections.jsonl").string() << '\n';
  return kExitOk;
}

void write_curve(const fs::path& path, const std::vector<double>& x, const std::vector<double>& y) {
  std::ofstream f(path, std::ios::trunc);
  f << std::setprecision(10);
  for (std::size_t i = 0; i < x.size(); ++i) f << x[i] << ' ' << y[i] << '\n';
}

std::string pct(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * v;
  return s.str();
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.proposals_path.empty() && o.detections_path.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "eval needs --proposals and/or --detections");
  }
  const DatasetManifest manifest = load_manifest(o.data.manifest);
  const auto gt = manifest.ground_truth();
  const fs::path dir = prepare_out_dir(o);
  ordered_json summary;
  const auto grid = default_tiou_grid();

  if (!o.proposals_path.empty()) {
    std::ifstream in(o.proposals_path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + o.proposals_path);
    const RankedProposals proposals = read_proposals(in);

    const std::vector<int> budgets{10, 50, 100, 500};
    out << "Proposals      ";
    for (const int k : budgets) out << std::setw(9) << ("@" + std::to_string(k));
    out << "\nAvg.Recall     ";
    for (const int k : budgets) {
      const double ar = average_recall(proposals, gt, k, grid);
      summary["proposals"]["AR@" + std::to_string(k)] = ar;
      out << std::setw(9) << pct(ar);
    }
    out << "\nRecall@0.5     ";
    for (const int k : budgets) {
      const double r = recall_at_k(proposals, gt, k, 0.5);
      summary["proposals"]["R@0.5@" + std::to_string(k)] = r;
      out << std::setw(9) << pct(r);
    }
    out << '\n';

    for (const int k : {1, 5, 20}) {
      const auto curve = recall_vs_iou_curve(proposals, gt, k, grid);
      write_curve(dir / ("recall_vs_iou_top" + std::to_string(k) + ".txt"), curve.iou_grid, curve.recall);
    }
    std::vector<int> counts;
    for (int k = 1; k <= 100; ++k) counts.push_back(k);
    for (const double t : {0.5, 0.75, 0.95}) {
      const auto curve = recall_vs_count_curve(proposals, gt, counts, t);
      std::ostringstream name;
      name << "recall_vs_count_iou" << std::fixed << std::setprecision(2) << t << ".txt";
      write_curve(dir / name.str(), std::vector<double>(curve.counts.begin(), curve.counts.end()),
                  curve.recall);
    }
  }

  if (!o.detections_path.empty()) {
    std::ifstream in(o.detections_path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open " + o.detections_path);
    const auto detections = read_detections(in);
    out << "Detection      " << std::setw(9) << "mAP@.5" << std::setw(9) << "mAP@.75" << std::setw(9)
        << "mAP@.95" << std::setw(9) << "avg" << '\n';
    out << "mAP            ";
    for (const double t : {0.5, 0.75, 0.95}) {
      const auto ap = mean_average_precision(detections, gt, t);
      std::ostringstream key;
      key << "mAP@" << std::setprecision(2) << t;
      summary["detections"][key.str()] = ap.map_value;
      out << std::setw(9) << pct(ap.map_value);
    }
    double sum = 0.0;
    for (const double t : grid) sum += mean_average_precision(detections, gt, t).map_value;
    summary["detections"]["mAP@[.5:.95]"] = sum / static_cast<double>(grid.size());
    out << std::setw(9) << pct(sum / static_cast<double>(grid.size())) << '\n';
  }

  std::ofstream(dir / "summary.json", std::ios::trunc) << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_export_timelines(const Options& o, std::ostream& out) {
  const DatasetManifest manifest = load_manifest(o.data.manifest);
  std::ifstream in(o.proposals_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + o.proposals_path);
  const RankedProposals proposals = read_proposals(in);
  const int top = o.top > 0 ? o.top : 5;

  const fs::path dir = prepare_out_dir(o) / "timelines";
  fs::create_directories(dir);
  for (const auto& [id, entry] : manifest.videos) {
    std::ofstream f(dir / (id + ".txt"), std::ios::trunc);
    f << "# video " << id << " frames " << entry.num_frames << '\n';
    f << "# track rank begin end label\n";
    for (const auto& a : entry.annotations) {
      f << "gt 0 " << a.interval.begin << ' ' << a.interval.end << ' ' << manifest.label_name(a.class_id) << '\n';
    }
    const auto it = proposals.find(id);
    if (it == proposals.end()) continue;
    const std::size_t n = std::min(it->second.size(), static_cast<std::size_t>(top));
    for (std::size_t r = 0; r < n; ++r) {
      f << "proposal " << r + 1 << ' ' << it->second[r].begin << ' ' << it->second[r].end << " -\n";
    }
  }
  out << "wrote " << manifest.videos.size() << " timelines to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Temporal context network: anchors, ranking, classification and evaluation", "tcn"};
  app.set_config("--config", "", "TOML/INI file of option defaults; command-line flags win");
  app.require_subcommand(1);
  app.add_option("--jobs", o.jobs, "Worker threads for per-video work")->capture_default_str();
  app.add_flag("-v,--verbose", o.verbosity, "More output");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_out_option(synth, o);
  synth->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  synth->add_option("--videos", o.synth.num_videos, "Number of videos")->capture_default_str();
  synth->add_option("--min-frames", o.synth.min_frames)->capture_default_str();
  synth->add_option("--max-frames", o.synth.max_frames)->capture_default_str();
  synth->add_option("--dim", o.synth.dim, "Feature dimension")->capture_default_str();
  synth->add_option("--classes", o.synth.num_classes)->capture_default_str();
  synth->add_option("--min-activities", o.synth.min_activities)->capture_default_str();
  synth->add_option("--max-activities", o.synth.max_activities)->capture_default_str();
  synth->add_option("--min-duration", o.synth.min_duration)->capture_default_str();
  synth->add_option("--max-duration", o.synth.max_duration)->capture_default_str();
  synth->add_option("--duration-choices", o.synth.duration_choices,
                    "Draw durations from this list instead of the min/max range")
      ->delimiter(',');
  synth->add_option("--snr", o.synth.snr, "Activity amplitude over unit noise")->capture_default_str();
  synth->add_flag("!--no-boundary-signal", o.synth.boundary_signal, "Omit boundary transients");
  synth->add_option("--fps", o.synth.fps)->capture_default_str();

  auto* anchors = app.add_subcommand("generate-anchors", "Print the anchor pyramid for a video length");
  anchors->add_option("--frames", o.frames, "Video length T")->required();
  add_anchor_options(anchors, o);
  anchors->add_option("--out", o.out_dir, "Write anchors.txt here instead of stdout");

  auto* train_r = app.add_subcommand("train-ranker", "Train the proposal ranker");
  add_data_options(train_r, o);
  add_out_option(train_r, o);
  add_anchor_options(train_r, o);
  add_ranker_model_options(train_r, o);
  train_r->add_option("--iterations", o.iterations, "SGD iterations")->capture_default_str();
  train_r->add_option("--seed", o.seed)->capture_default_str();

  auto* train_c = app.add_subcommand("train-classifier", "Train the segment classifier");
  add_data_options(train_c, o);
  add_out_option(train_c, o);
  add_anchor_options(train_c, o);
  add_optimizer_options(train_c, o.classifier.optimizer);
  train_c->add_option("--batch-size", o.classifier.batch_size)->capture_default_str();
  train_c->add_option("--background-per-batch", o.classifier.bg_per_batch)->capture_default_str();
  train_c->add_option("--iterations", o.iterations, "SGD iterations")->capture_default_str();
  train_c->add_option("--seed", o.seed)->capture_default_str();

  auto* rank = app.add_subcommand("rank", "Score and sort anchors with a trained ranker");
  add_data_options(rank, o);
  add_out_option(rank, o);
  add_anchor_options(rank, o);
  rank->add_option("--ranker", o.ranker_path, "Ranker checkpoint")->required()->check(CLI::ExistingFile);
  rank->add_option("--nms", o.detect.nms_threshold, "NMS threshold")->capture_default_str();
  rank->add_flag("--no-nms", o.no_nms, "Keep every anchor");
  rank->add_option("--top", o.top, "Keep at most this many per video (0 = all)")->capture_default_str();

  auto* det = app.add_subcommand("detect", "Run the full detection pipeline");
  add_data_options(det, o);
  add_out_option(det, o);
  add_anchor_options(det, o);
  det->add_option("--ranker", o.ranker_path)->required()->check(CLI::ExistingFile);
  det->add_option("--classifier", o.classifier_path)->required()->check(CLI::ExistingFile);
  det->add_option("--top-k", o.detect.top_k)->capture_default_str();
  det->add_option("--nms", o.detect.nms_threshold)->capture_default_str();
  det->add_option("--score-combination", o.combination, "classifier_only | product")
      ->capture_default_str();
  det->add_flag("--nms-after-classification", o.detect.nms_after_classification);

  auto* eval = app.add_subcommand("eval", "Recall and mAP tables plus plot data");
  eval->add_option("--manifest", o.data.manifest)->required()->check(CLI::ExistingFile);
  eval->add_option("--proposals", o.proposals_path)->check(CLI::ExistingFile);
  eval->add_option("--detections", o.detections_path)->check(CLI::ExistingFile);
  add_out_option(eval, o);

  auto* timelines = app.add_subcommand("export-timelines", "Per-video ground truth vs top proposals");
  timelines->add_option("--manifest", o.data.manifest)->required()->check(CLI::ExistingFile);
  timelines->add_option("--proposals", o.proposals_path)->required()->check(CLI::ExistingFile);
  timelines->add_option("--top", o.top, "Proposals per video")->capture_default_str();
  add_out_option(timelines, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: Usage: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out);
    if (anchors->parsed()) return cmd_generate_anchors(o, out);
    if (train_r->parsed()) return cmd_train_ranker(o, out);
    if (train_c->parsed()) return cmd_train_classifier(o, out);
    if (rank->parsed()) return cmd_rank(o, out);
    if (det->parsed()) return cmd_detect(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (timelines->parsed()) return cmd_export_timelines(o, out);
  } catch (const Error& e) {
    err << "error: " << error_name(e.code()) << ": " << e.what() << '\n';
    return exit_status_for(e.code());
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"tcn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace tcn::cli
