#include <fstream>
#include <sstream>

#include <doctest.h>

#include "../support/test_util.hpp"
#include "tcn/data_io.hpp"

using namespace tcn;

namespace {

const char* kMinimal = R"({
  "label_names": ["jump", "run"],
  "videos": {
    "clip": {"num_frames": 900, "fps": 30, "annotations": [
      {"label": "run", "segment": [10.0, 20.0]},
      {"label": "jump", "frames": [0, 12]}
    ]}
  }
})";

std::string bytes_of(const FeatureSequence& fs) {
  std::stringstream buf;
  write_features(buf, fs);
  return buf.str();
}

std::optional<ErrorCode> read_error(const std::string& bytes) {
  return test::thrown_code([&] {
    std::istringstream in(bytes);
    read_features(in, "x");
  });
}

}  // namespace

TEST_CASE("manifest parsing and round trip") {
  const DatasetManifest m = parse_manifest(kMinimal);
  const auto& clip = m.videos.at("clip");
  CHECK(clip.num_frames == 900);
  REQUIRE(clip.annotations.size() == 2);
  CHECK(clip.annotations[0].interval == TemporalInterval{300, 600});
  CHECK(clip.annotations[0].class_id == 2);
  CHECK(clip.annotations[1].interval == TemporalInterval{0, 12});
  CHECK(m.label_name(1) == "jump");
  CHECK(m.label_name(0) == "background");

  CHECK(parse_manifest(manifest_to_json(m)) == m);

  const auto gt = m.ground_truth();
  REQUIRE(gt.size() == 1);
  CHECK(gt[0].video_id == "clip");
  CHECK(gt[0].intervals.size() == 2);
}

TEST_CASE("manifest errors") {
  auto code = [](const std::string& text) { return test::thrown_code([&] { parse_manifest(text); }); };
  CHECK(code("{ not json") == ErrorCode::kParseError);
  CHECK(code("[]") == ErrorCode::kParseError);
  CHECK(code(R"({"videos": {}})") == ErrorCode::kParseError);
  CHECK(code(R"({"label_names": [], "videos": {"a": {}}})") == ErrorCode::kParseError);
  CHECK(code(R"({"label_names": ["x"], "videos": {"a": {"num_frames": "ten"}}})") == ErrorCode::kParseError);
  CHECK(code(R"({"version": 7, "label_names": [], "videos": {}})") == ErrorCode::kParseError);

  try {
    parse_manifest(R"({"label_names": ["x"], "videos": {"a": {"num_frames": 50, "annotations": [
        {"label": "swim", "frames": [0, 10]},
        {"label": "x", "frames": [10, 10]},
        {"label": "x", "frames": [40, 60]}]}}})");
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidationError);
    const std::string msg = e.what();
    CHECK(msg.find("swim") != std::string::npos);
    CHECK(msg.find("degenerate") != std::string::npos);
    CHECK(msg.find("outside") != std::string::npos);
  }

  try {
    parse_manifest("{\n  \"label_names\": [\"x\",\n}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("manifest files") {
  test::TempDir dir("manifest");
  const DatasetManifest m = parse_manifest(kMinimal);
  save_manifest(dir.path() / "m.json", m);
  CHECK(load_manifest(dir.path() / "m.json") == m);
  CHECK(test::thrown_code([&] { load_manifest(dir.path() / "missing.json"); }) == ErrorCode::kIoError);
}

TEST_CASE("feature round trip") {
  FeatureSequence fs{"seq", RowMatrix<float>::Random(7, 3)};
  fs.values(0, 0) = -0.0f;
  fs.values(6, 2) = std::numeric_limits<float>::denorm_min();
  const std::string bytes = bytes_of(fs);
  CHECK(bytes.size() == 16 + 7 * 3 * 4);
  CHECK(bytes.substr(0, 4) == "TCNF");

  std::istringstream in(bytes);
  const FeatureSequence back = read_features(in, "seq");
  CHECK(back.values.rows() == 7);
  CHECK(std::memcmp(back.values.data(), fs.values.data(), 7 * 3 * sizeof(float)) == 0);
  CHECK(bytes_of(back) == bytes);

  test::TempDir dir("features");
  write_features(feature_path(dir.path(), "clip_9"), fs);
  const FeatureSequence from_file = read_features(feature_path(dir.path(), "clip_9"));
  CHECK(from_file.video_id == "clip_9");
  CHECK(from_file.values == fs.values);
}

TEST_CASE("feature header errors") {
  const std::string good = bytes_of({"x", RowMatrix<float>::Ones(4, 2)});
  CHECK_FALSE(read_error(good).has_value());

  std::string magic = good;
  magic[3] = 'W';
  CHECK(read_error(magic) == ErrorCode::kBadMagic);
  CHECK(read_error(good.substr(0, 3)) == ErrorCode::kTruncatedFile);
  CHECK(read_error(good.substr(0, 10)) == ErrorCode::kTruncatedFile);
  CHECK(read_error(good.substr(0, good.size() - 2)) == ErrorCode::kTruncatedFile);

  std::string version = good;
  version[4] = 2;
  CHECK(read_error(version) == ErrorCode::kParseError);

  std::string zero = good;
  zero[8] = zero[9] = zero[10] = zero[11] = 0;
  CHECK(read_error(zero) == ErrorCode::kDimOverflow);

  std::string huge = good;
  for (int i = 8; i < 16; ++i) huge[static_cast<std::size_t>(i)] = '\xff';
  CHECK(read_error(huge) == ErrorCode::kDimOverflow);
}

TEST_CASE("dataset features are checked against the manifest") {
  test::TempDir dir("dataset");
  SynthConfig sc;
  sc.num_videos = 2;
  sc.seed = 1;
  const auto data = generate_synthetic(sc);
  write_dataset(dir.path(), data);
  const auto loaded = load_dataset_features(load_manifest(dir.path() / "manifest.json"), dir.path() / "features");
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].values == data.features[0].values);

  DatasetManifest wrong = data.manifest;
  wrong.videos.begin()->second.num_frames += 1;
  CHECK(test::thrown_code([&] { load_dataset_features(wrong, dir.path() / "features"); }) ==
        ErrorCode::kValidationError);
  std::filesystem::remove(feature_path(dir.path() / "features", data.features[1].video_id));
  CHECK(test::thrown_code([&] { load_dataset_features(data.manifest, dir.path() / "features"); }) ==
        ErrorCode::kIoError);
}

TEST_CASE("synthetic generator") {
  SynthConfig sc;
  sc.num_videos = 12;
  sc.seed = 99;
  const auto a = generate_synthetic(sc);
  const auto b = generate_synthetic(sc);
  CHECK(a.manifest == b.manifest);
  REQUIRE(a.features.size() == 12);
  for (std::size_t i = 0; i < a.features.size(); ++i) CHECK(bytes_of(a.features[i]) == bytes_of(b.features[i]));

  sc.seed = 100;
  CHECK_FALSE(generate_synthetic(sc).manifest == a.manifest);

  for (const auto& [id, entry] : a.manifest.videos) {
    CHECK(entry.num_frames >= sc.min_frames);
    CHECK(entry.num_frames <= sc.max_frames);
    for (std::size_t i = 0; i < entry.annotations.size(); ++i) {
      const auto& iv = entry.annotations[i].interval;
      CHECK(iv.begin >= 0);
      CHECK(iv.end <= entry.num_frames);
      CHECK(iv.length() >= sc.min_duration);
      CHECK(iv.length() <= sc.max_duration);
      if (i > 0) CHECK(entry.annotations[i - 1].interval.end + 4 <= iv.begin);
    }
  }

  SynthConfig choices;
  choices.num_videos = 20;
  choices.duration_choices = {32, 64};
  for (const auto& [id, entry] : generate_synthetic(choices).manifest.videos)
    for (const auto& ann : entry.annotations) CHECK((ann.interval.length() == 32 || ann.interval.length() == 64));
}

TEST_CASE("synthetic signal layout") {
  SynthConfig sc;
  sc.num_videos = 1;
  sc.min_activities = sc.max_activities = 1;
  sc.snr = 0.0;
  const auto quiet = generate_synthetic(sc);
  sc.snr = 5.0;
  const auto loud = generate_synthetic(sc);
  // Same seed draws the same noise; the difference is the planted signal alone.
  const RowMatrix<float> diff = loud.features[0].values - quiet.features[0].values;
  const auto& ann = loud.manifest.videos.begin()->second.annotations.at(0);
  const auto& iv = ann.interval;
  for (Frame t = 0; t < diff.rows(); ++t) {
    const bool inside = t >= iv.begin && t < iv.end;
    CHECK(diff(t, ann.class_id - 1) == doctest::Approx(inside ? 5.0 : 0.0).epsilon(1e-5));
    const bool edge = t == iv.begin - 1 || t == iv.begin || t == iv.end - 1 || t == iv.end;
    CHECK(diff(t, sc.num_classes) == doctest::Approx(edge ? 5.0 : 0.0).epsilon(1e-5));
  }
}

TEST_CASE("synthetic config validation") {
  auto code = [](auto mutate) {
    SynthConfig c;
    mutate(c);
    return test::thrown_code([&] { c.validate(); });
  };
  CHECK_FALSE(code([](SynthConfig&) {}).has_value());
  CHECK(code([](SynthConfig& c) { c.dim = 4; }) == ErrorCode::kConfigError);
  CHECK(code([](SynthConfig& c) { c.max_duration = 500; }) == ErrorCode::kConfigError);
  CHECK(code([](SynthConfig& c) { c.snr = -1.0; }) == ErrorCode::kConfigError);
  CHECK(code([](SynthConfig& c) { c.duration_choices = {0}; }) == ErrorCode::kConfigError);
  CHECK(code([](SynthConfig& c) { c.num_videos = 0; }) == ErrorCode::kConfigError);
}

TEST_CASE("separable pairs") {
  const auto ex = generate_separable_pairs(10, 8, 3, 0.0, 1);
  REQUIRE(ex.size() == 10);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    CHECK(ex[i].label == static_cast<int>(i % 2));
    CHECK(ex[i].pair.inner(0, 0) == static_cast<double>(ex[i].label));
    CHECK(ex[i].pair.outer.rows() == 8);
  }
}
