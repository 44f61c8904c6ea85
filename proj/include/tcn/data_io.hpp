#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tcn/core.hpp"
#include "tcn/ranker.hpp"
#include "tcn/sampling.hpp"

namespace tcn {

struct VideoEntry {
  Frame num_frames = 0;
  double fps = 30.0;
  std::vector<LabeledInterval> annotations;  // frame units, class_id indexes label_names from 1

  friend bool operator==(const VideoEntry&, const VideoEntry&) = default;
};

/// Dataset annotations. Class id c names label_names[c - 1]; id 0 is background.
struct DatasetManifest {
  std::vector<std::string> label_names;
  std::map<std::string, VideoEntry> videos;

  /// Ground truth per video, in video-id order.
  std::vector<GroundTruthAnnotation> ground_truth() const;
  /// Name for a class id; "background" for 0.
  std::string label_name(int class_id) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

inline constexpr int kManifestVersion = 1;

/// Parses manifest JSON. Segments may be given in seconds ("segment") or frames ("frames");
/// seconds convert with round(sec * fps). Throws kParseError for malformed input and
/// kValidationError listing every semantic violation.
DatasetManifest parse_manifest(const std::string& text);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Canonical JSON form (frame units).
std::string manifest_to_json(const DatasetManifest& manifest);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Feature file:
///   char[4] magic "TCNF", u32 version (1), u32 T, u32 D, then T*D f32 values row-major,
///   all little-endian.
inline constexpr char kFeatureMagic[4] = {'T', 'C', 'N', 'F'};
inline constexpr std::uint32_t kFeatureVersion = 1;

void write_features(std::ostream& out, const FeatureSequence& fs);
FeatureSequence read_features(std::istream& in, const std::string& video_id);

void write_features(const std::filesystem::path& path, const FeatureSequence& fs);
/// The video id is the file stem.
FeatureSequence read_features(const std::filesystem::path& path);

std::filesystem::path feature_path(const std::filesystem::path& feature_dir, const std::string& video_id);

/// Loads `<feature_dir>/<video_id>.tcnf` for every manifest video, checking T against the manifest.
std::vector<FeatureSequence> load_dataset_features(const DatasetManifest& manifest,
                                                   const std::filesystem::path& feature_dir);

struct SynthConfig {
  int num_videos = 200;
  Frame min_frames = 192;
  Frame max_frames = 320;
  Eigen::Index dim = 8;
  int num_classes = 3;
  int min_activities = 1;
  int max_activities = 2;
  Frame min_duration = 32;
  Frame max_duration = 128;
  std::vector<Frame> duration_choices;  // when non-empty, durations are drawn uniformly from it
  double snr = 2.0;        // activity amplitude in units of the unit-variance background noise
  bool boundary_signal = true;
  double fps = 30.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticDataset {
  DatasetManifest manifest;
  std::vector<FeatureSequence> features;  // same order as manifest.videos
};

/// Background is N(0, 1) on every channel. An activity of class c over [b, e) adds `snr` on
/// channel c - 1. With boundary_signal, frames b - 1, b, e - 1 and e additionally receive
/// `snr` on channel num_classes.
SyntheticDataset generate_synthetic(const SynthConfig& cfg);

/// Writes manifest.json and features/<id>.tcnf under `dir`.
void write_dataset(const std::filesystem::path& dir, const SyntheticDataset& data);

/// Context pairs where positives carry a constant +1 on channel 0 over N(0, noise^2) noise.
std::vector<RankerExample> generate_separable_pairs(int count, int samples, Eigen::Index dim,
                                                    double noise, std::uint64_t seed);

}  // namespace tcn
