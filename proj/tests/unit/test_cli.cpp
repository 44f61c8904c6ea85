#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "../support/test_util.hpp"
#include "tcn/cli.hpp"
#include "tcn/ranker.hpp"

using namespace tcn;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult tcn_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::trunc) << text; }

}  // namespace

TEST_CASE("exit status mapping") {
  CHECK(cli::exit_status_for(ErrorCode::kInvalidConfig) == 2);
  CHECK(cli::exit_status_for(ErrorCode::kConfigError) == 2);
  CHECK(cli::exit_status_for(ErrorCode::kBadMagic) == 3);
  CHECK(cli::exit_status_for(ErrorCode::kValidationError) == 3);
  CHECK(cli::exit_status_for(ErrorCode::kDimensionMismatch) == 3);
  CHECK(cli::exit_status_for(ErrorCode::kShapeError) == 4);
  CHECK(cli::exit_status_for(ErrorCode::kStateError) == 4);
}

TEST_CASE("usage errors") {
  const auto none = tcn_run({});
  CHECK(none.code == 2);

  test::TempDir dir("usage");
  const auto missing = tcn_run({"eval", "--manifest", (dir.path() / "nope.json").string(), "--out",
                                dir.path().string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("error: Usage") != std::string::npos);
  CHECK(missing.err.find("--manifest") != std::string::npos);

  CHECK(tcn_run({"synth", "--out", dir.path().string(), "--dim", "2"}).code == 2);
  CHECK(tcn_run({"--help"}).code == 0);
}

TEST_CASE("eval on the hand-built fixture") {
  test::TempDir dir("eval");
  write_text(dir.path() / "manifest.json",
             R"({"label_names": ["act"], "videos": {"a": {"num_frames": 100, "annotations": [{"label": "act", "frames": [10, 20]}]}}})");
  write_text(dir.path() / "dets.jsonl",
             "{\"video_id\":\"a\",\"begin\":10,\"end\":20,\"class_id\":1,\"score\":0.9}\n"
             "{\"video_id\":\"a\",\"begin\":50,\"end\":60,\"class_id\":1,\"score\":0.8}\n");
  write_text(dir.path() / "props.jsonl",
             "{\"video_id\":\"a\",\"begin\":10,\"end\":20,\"score\":0.9}\n"
             "{\"video_id\":\"a\",\"begin\":50,\"end\":60,\"score\":0.8}\n");
  const auto r = tcn_run({"eval", "--manifest", (dir.path() / "manifest.json").string(), "--detections",
                          (dir.path() / "dets.jsonl").string(), "--proposals", (dir.path() / "props.jsonl").string(),
                          "--out", (dir.path() / "eval").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mAP@.5") != std::string::npos);
  CHECK(r.out.find("100.00") != std::string::npos);

  const auto summary = nlohmann::json::parse(slurp(dir.path() / "eval" / "summary.json"));
  CHECK(summary["detections"]["mAP@0.5"].get<double>() == 1.0);
  CHECK(summary["proposals"]["AR@10"].get<double>() == 1.0);
  CHECK(fs::exists(dir.path() / "eval" / "recall_vs_iou_top5.txt"));
  CHECK(fs::exists(dir.path() / "eval" / "recall_vs_count_iou0.50.txt"));

  write_text(dir.path() / "bad.jsonl", "{\"video_id\": 3}\n");
  const auto bad = tcn_run({"eval", "--manifest", (dir.path() / "manifest.json").string(), "--detections",
                            (dir.path() / "bad.jsonl").string(), "--out", (dir.path() / "eval2").string()});
  CHECK(bad.code == 3);
  CHECK(bad.err.rfind("error: ParseError", 0) == 0);
}

TEST_CASE("proposal and detection files round trip") {
  std::stringstream props;
  const std::vector<Proposal> ranked{{{4, 20}, 1, 2, 0.75}, {{-8, 24}, 0, 3, 0.5}};
  cli::write_proposals(props, "vid", ranked);
  const auto back = cli::read_proposals(props);
  CHECK(back.at("vid") == std::vector<TemporalInterval>{{4, 20}, {-8, 24}});

  DatasetManifest m;
  m.label_names = {"a", "b"};
  std::stringstream dets;
  const std::vector<Detection> d{{"vid", {1, 9}, 2, 0.125}};
  cli::write_detections(dets, d, m);
  CHECK(dets.str().find("\"class_name\":\"b\"") != std::string::npos);
  CHECK(cli::read_detections(dets) == d);
}

TEST_CASE("synth is deterministic") {
  test::TempDir a("synth_a"), b("synth_b");
  CHECK(tcn_run({"synth", "--seed", "7", "--videos", "5", "--out", a.path().string()}).code == 0);
  CHECK(tcn_run({"synth", "--seed", "7", "--videos", "5", "--out", b.path().string()}).code == 0);
  const auto ta = tree(a.path());
  CHECK(ta.size() == 6);
  CHECK(ta == tree(b.path()));
}

TEST_CASE("generate-anchors") {
  const auto r = tcn_run({"generate-anchors", "--frames", "64", "--base-length", "16", "--scales", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("-24 40") != std::string::npos);
  CHECK(tcn_run({"generate-anchors", "--frames", "64", "--base-length", "15"}).code == 2);
}

TEST_CASE("full command chain") {
  test::TempDir dir("chain");
  const std::string root = dir.path().string();
  const std::string manifest = root + "/data/manifest.json", features = root + "/data/features";
  REQUIRE(tcn_run({"synth", "--seed", "3", "--videos", "6", "--duration-choices", "32,64", "--out", root + "/data"}).code == 0);

  write_text(dir.path() / "ranker.toml",
             "[train-ranker]\nsamples = 8\nconv-channels = 4\nhidden = 8\nbatch-size = 32\n");
  const auto tr = tcn_run({"--config", root + "/ranker.toml", "train-ranker", "--manifest", manifest, "--features",
                           features, "--iterations", "3", "--out", root + "/models"});
  REQUIRE(tr.code == 0);
  const Ranker trained = Ranker::from_checkpoint(nn::read_checkpoint(fs::path(root + "/models/ranker.tcnw")));
  CHECK(trained.config().samples == 8);
  CHECK(trained.config().conv_channels == 4);
  const auto tc = tcn_run({"train-classifier", "--manifest", manifest, "--features", features, "--iterations", "3",
                           "--batch-size", "64", "--background-per-batch", "8", "--out", root + "/models"});
  REQUIRE(tc.code == 0);

  REQUIRE(tcn_run({"rank", "--manifest", manifest, "--features", features, "--ranker", root + "/models/ranker.tcnw",
                   "--top", "10", "--out", root + "/out"})
              .code == 0);
  REQUIRE(tcn_run({"--jobs", "2", "detect", "--manifest", manifest, "--features", features, "--ranker",
                   root + "/models/ranker.tcnw", "--classifier", root + "/models/classifier.tcnw",
                   "--score-combination", "product", "--out", root + "/out"})
              .code == 0);
  const auto ev = tcn_run({"eval", "--manifest", manifest, "--proposals", root + "/out/proposals.jsonl",
                           "--detections", root + "/out/detections.jsonl", "--out", root + "/eval"});
  REQUIRE(ev.code == 0);
  CHECK(ev.out.find("Avg.Recall") != std::string::npos);
  REQUIRE(tcn_run({"export-timelines", "--manifest", manifest, "--proposals", root + "/out/proposals.jsonl",
                   "--out", root + "/out"})
              .code == 0);
  CHECK(fs::exists(dir.path() / "out" / "timelines" / "synth_0000.txt"));

  // Classifier checkpoint handed to --ranker.
  const auto wrong = tcn_run({"rank", "--manifest", manifest, "--features", features, "--ranker",
                              root + "/models/classifier.tcnw", "--out", root + "/out2"});
  CHECK(wrong.code == 3);

  write_text(dir.path() / "garbage.tcnw", "nope");
  const auto garbage = tcn_run({"rank", "--manifest", manifest, "--features", features, "--ranker",
                                root + "/garbage.tcnw", "--out", root + "/out2"});
  CHECK(garbage.code == 3);
  CHECK(garbage.err.find("BadMagic") != std::string::npos);

  CHECK(tcn_run({"detect", "--manifest", manifest, "--features", features, "--ranker", root + "/models/ranker.tcnw",
                 "--classifier", root + "/models/classifier.tcnw", "--score-combination", "sum", "--out",
                 root + "/out"})
            .code == 2);
}
