#include "tcn/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"

namespace tcn {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::vector<GroundTruthAnnotation> DatasetManifest::ground_truth() const {
  std::vector<GroundTruthAnnotation> out;
  out.reserve(videos.size());
  for (const auto& [id, entry] : videos) out.push_back({id, entry.annotations});
  return out;
}

std::string DatasetManifest::label_name(int class_id) const {
  if (class_id == 0) return "background";
  if (class_id < 0 || static_cast<std::size_t>(class_id) > label_names.size()) {
    return "class_" + std::to_string(class_id);
  }
  return label_names[static_cast<std::size_t>(class_id - 1)];
}

namespace {

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
T field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kParseError, where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kParseError, where + "." + key + ": wrong type");
  }
}

}  // namespace

DatasetManifest parse_manifest(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "manifest is not valid JSON at " + line_context(text, e.byte));
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "manifest: top level must be an object");
  if (doc.contains("version") && field<int>(doc, "version", "manifest") != kManifestVersion) {
    throw Error(ErrorCode::kParseError, "manifest: unsupported version");
  }

  DatasetManifest m;
  m.label_names = field<std::vector<std::string>>(doc, "label_names", "manifest");
  std::map<std::string, int> class_of;
  for (std::size_t i = 0; i < m.label_names.size(); ++i) {
    class_of.emplace(m.label_names[i], static_cast<int>(i + 1));
  }

  std::vector<std::string> violations;
  if (class_of.size() != m.label_names.size()) violations.push_back("label_names contains duplicates");

  const json& videos = doc.contains("videos") ? doc.at("videos") : json();
  if (!videos.is_object()) throw Error(ErrorCode::kParseError, "manifest.videos: expected an object");

  for (const auto& [id, v] : videos.items()) {
    const std::string where = "videos." + id;
    VideoEntry entry;
    entry.num_frames = field<Frame>(v, "num_frames", where);
    entry.fps = v.contains("fps") ? field<double>(v, "fps", where) : 30.0;
    if (entry.num_frames < 1) violations.push_back(where + ": num_frames must be >= 1");
    if (!(entry.fps > 0.0)) violations.push_back(where + ": fps must be > 0");

    const json annotations = v.contains("annotations") ? v.at("annotations") : json::array();
    if (!annotations.is_array()) throw Error(ErrorCode::kParseError, where + ".annotations: expected an array");
    for (std::size_t a = 0; a < annotations.size(); ++a) {
      const json& ann = annotations[a];
      const std::string at = where + ".annotations[" + std::to_string(a) + "]";
      const auto label = field<std::string>(ann, "label", at);
      TemporalInterval interval;
      if (ann.contains("frames")) {
        const auto f = field<std::vector<Frame>>(ann, "frames", at);
        if (f.size() != 2) throw Error(ErrorCode::kParseError, at + ".frames: expected [begin, end]");
        interval = {f[0], f[1]};
      } else {
        const auto s = field<std::vector<double>>(ann, "segment", at);
        if (s.size() != 2) throw Error(ErrorCode::kParseError, at + ".segment: expected [start, end]");
        interval = {static_cast<Frame>(std::llround(s[0] * entry.fps)),
                    static_cast<Frame>(std::llround(s[1] * entry.fps))};
      }

      const auto cls = class_of.find(label);
      if (cls == class_of.end()) violations.push_back(at + ": unknown label '" + label + "'");
      if (!interval.valid()) {
        violations.push_back(at + ": degenerate segment [" + std::to_string(interval.begin) + "," +
                             std::to_string(interval.end) + ")");
      } else if (interval.begin < 0 || interval.end > entry.num_frames) {
        violations.push_back(at + ": segment [" + std::to_string(interval.begin) + "," +
                             std::to_string(interval.end) + ") lies outside [0," +
                             std::to_string(entry.num_frames) + ")");
      }
      entry.annotations.push_back({interval, cls == class_of.end() ? 0 : cls->second});
    }
    m.videos.emplace(id, std::move(entry));
  }

  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " manifest violation(s): ";
    for (std::size_t i = 0; i < violations.size(); ++i) msg += (i ? "; " : "") + violations[i];
    throw Error(ErrorCode::kValidationError, msg);
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::string manifest_to_json(const DatasetManifest& m) {
  nlohmann::ordered_json doc;
  doc["version"] = kManifestVersion;
  doc["label_names"] = m.label_names;
  nlohmann::ordered_json videos = nlohmann::ordered_json::object();
  for (const auto& [id, entry] : m.videos) {
    nlohmann::ordered_json v;
    v["num_frames"] = entry.num_frames;
    v["fps"] = entry.fps;
    v["annotations"] = nlohmann::ordered_json::array();
    for (const auto& a : entry.annotations) {
      v["annotations"].push_back({{"label", m.label_name(a.class_id)},
                                  {"frames", {a.interval.begin, a.interval.end}}});
    }
    videos[id] = std::move(v);
  }
  doc["videos"] = std::move(videos);
  return doc.dump(2) + "\n";
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write manifest " + path.string());
  out << manifest_to_json(manifest);
}

void write_features(std::ostream& out, const FeatureSequence& fs) {
  out.write(kFeatureMagic, 4);
  detail::put_le<std::uint32_t>(out, kFeatureVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(fs.values.rows()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(fs.values.cols()));
  for (Eigen::Index i = 0; i < fs.values.size(); ++i) detail::put_f32(out, fs.values.data()[i]);
  if (!out) throw Error(ErrorCode::kIoError, "failed to write features for '" + fs.video_id + "'");
}

FeatureSequence read_features(std::istream& in, const std::string& video_id) {
  char magic[4] = {};
  if (!in.read(magic, 4)) throw Error(ErrorCode::kTruncatedFile, "feature file shorter than its magic");
  if (!std::equal(magic, magic + 4, kFeatureMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a TCNF feature file");
  }
  const auto version = detail::get_le<std::uint32_t>(in, "feature version");
  if (version != kFeatureVersion) {
    throw Error(ErrorCode::kParseError, "unsupported feature file version " + std::to_string(version));
  }
  const auto rows = detail::get_le<std::uint32_t>(in, "frame count");
  const auto cols = detail::get_le<std::uint32_t>(in, "feature dimension");
  // 2^31 floats (8 GiB) is far past anything this tool handles.
  constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 31;
  if (rows == 0 || cols == 0 || static_cast<std::uint64_t>(rows) * cols > kMaxValues) {
    throw Error(ErrorCode::kDimOverflow,
                "feature header declares " + std::to_string(rows) + "x" + std::to_string(cols));
  }

  FeatureSequence fs;
  fs.video_id = video_id;
  fs.values.resize(rows, cols);
  std::vector<char> raw(static_cast<std::size_t>(rows) * cols * 4);
  if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size()))) {
    throw Error(ErrorCode::kTruncatedFile, "feature file holds fewer than " + std::to_string(rows) +
                                               "x" + std::to_string(cols) + " values");
  }
  for (std::size_t i = 0; i < raw.size() / 4; ++i) {
    std::uint32_t bits = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[4 * i + b])) << (8 * b);
    }
    fs.values.data()[i] = std::bit_cast<float>(bits);
  }
  return fs;
}

void write_features(const fs::path& path, const FeatureSequence& fs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  write_features(out, fs);
}

FeatureSequence read_features(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_features(in, path.stem().string());
}

fs::path feature_path(const fs::path& feature_dir, const std::string& video_id) {
  return feature_dir / (video_id + ".tcnf");
}

std::vector<FeatureSequence> load_dataset_features(const DatasetManifest& manifest,
                                                   const fs::path& feature_dir) {
  std::vector<FeatureSequence> out;
  out.reserve(manifest.videos.size());
  for (const auto& [id, entry] : manifest.videos) {
    FeatureSequence f = read_features(feature_path(feature_dir, id));
    if (f.num_frames() != entry.num_frames) {
      throw Error(ErrorCode::kValidationError, "features for '" + id + "' have " +
                                                   std::to_string(f.num_frames()) +
                                                   " frames, manifest says " +
                                                   std::to_string(entry.num_frames));
    }
    out.push_back(std::move(f));
  }
  return out;
}

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, what); };
  if (num_videos < 1) fail("num_videos must be >= 1");
  if (min_frames < 1 || max_frames < min_frames) fail("frame range must satisfy 1 <= min <= max");
  if (num_classes < 1) fail("num_classes must be >= 1");
  if (dim < num_classes + 2) fail("dim must be >= num_classes + 2");
  if (min_activities < 0 || max_activities < min_activities) fail("activity count range is invalid");
  if (min_duration < 1 || max_duration < min_duration) fail("duration range is invalid");
  if (max_activities > 0 && duration_choices.empty() && max_duration > min_frames)
    fail("max_duration must fit in the shortest video");
  for (const Frame d : duration_choices) {
    if (d < 1) fail("duration_choices entries must be positive");
    if (max_activities > 0 && d > min_frames) fail("duration_choices entries must fit in the shortest video");
  }
  if (!(snr >= 0.0) || !std::isfinite(snr)) fail("snr must be finite and >= 0");
  if (!(fps > 0.0)) fail("fps must be > 0");
}

namespace {

// Non-overlapping activities separated by at least `gap` frames; gives up on a slot after
// a bounded number of attempts so short videos simply get fewer activities.
std::vector<TemporalInterval> place_activities(Frame num_frames, int count, const SynthConfig& cfg,
                                               std::mt19937_64& rng) {
  constexpr Frame kGap = 4;
  constexpr int kAttempts = 64;
  std::uniform_int_distribution<Frame> duration(cfg.min_duration, cfg.max_duration);
  std::uniform_int_distribution<std::size_t> choice(0, std::max<std::size_t>(1, cfg.duration_choices.size()) - 1);
  std::vector<TemporalInterval> placed;
  for (int a = 0; a < count; ++a) {
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      const Frame len = cfg.duration_choices.empty() ? duration(rng) : cfg.duration_choices[choice(rng)];
      std::uniform_int_distribution<Frame> start(0, num_frames - len);
      const Frame begin = start(rng);
      const TemporalInterval act{begin, begin + len};
      const bool clear = std::none_of(placed.begin(), placed.end(), [&](const TemporalInterval& o) {
        return act.begin < o.end + kGap && o.begin < act.end + kGap;
      });
      if (clear) {
        placed.push_back(act);
        break;
      }
    }
  }
  std::sort(placed.begin(), placed.end(),
            [](const TemporalInterval& x, const TemporalInterval& y) { return x.begin < y.begin; });
  return placed;
}

}  // namespace

SyntheticDataset generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<Frame> frames(cfg.min_frames, cfg.max_frames);
  std::uniform_int_distribution<int> activities(cfg.min_activities, cfg.max_activities);
  std::uniform_int_distribution<int> klass(1, cfg.num_classes);

  SyntheticDataset data;
  for (int c = 1; c <= cfg.num_classes; ++c) data.manifest.label_names.push_back("class_" + std::to_string(c));

  const int width = std::max(4, static_cast<int>(std::to_string(cfg.num_videos - 1).size()));
  char id_buf[64];
  const auto boundary_channel = static_cast<Eigen::Index>(cfg.num_classes);
  for (int v = 0; v < cfg.num_videos; ++v) {
    std::snprintf(id_buf, sizeof(id_buf), "synth_%0*d", std::min(width, 32), v);
    const std::string id = id_buf;

    const Frame num_frames = frames(rng);
    const auto placed = place_activities(num_frames, activities(rng), cfg, rng);

    RowMatrix<double> x(num_frames, cfg.dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = noise(rng);

    VideoEntry entry;
    entry.num_frames = num_frames;
    entry.fps = cfg.fps;
    for (const auto& act : placed) {
      const int c = klass(rng);
      entry.annotations.push_back({act, c});
      x.block(act.begin, c - 1, act.length(), 1).array() += cfg.snr;
      if (cfg.boundary_signal) {
        for (const Frame t : {act.begin - 1, act.begin, act.end - 1, act.end}) {
          if (t >= 0 && t < num_frames) x(t, boundary_channel) += cfg.snr;
        }
      }
    }

    FeatureSequence f;
    f.video_id = id;
    f.values = x.cast<float>();
    data.manifest.videos.emplace(id, std::move(entry));
    data.features.push_back(std::move(f));
  }
  return data;
}

void write_dataset(const fs::path& dir, const SyntheticDataset& data) {
  fs::create_directories(dir / "features");
  save_manifest(dir / "manifest.json", data.manifest);
  for (const auto& f : data.features) write_features(feature_path(dir / "features", f.video_id), f);
}

std::vector<RankerExample> generate_separable_pairs(int count, int samples, Eigen::Index dim,
                                                    double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<RankerExample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RankerExample e;
    e.label = i % 2;
    e.pair.inner.resize(samples, dim);
    e.pair.outer.resize(samples, dim);
    for (auto* m : {&e.pair.inner, &e.pair.outer}) {
      for (Eigen::Index k = 0; k < m->size(); ++k) m->data()[k] = gauss(rng);
      if (e.label == 1) m->col(0).array() += 1.0;
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace tcn
