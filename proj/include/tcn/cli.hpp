#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tcn/core.hpp"
#include "tcn/data_io.hpp"
#include "tcn/metrics.hpp"

namespace tcn::cli {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

int exit_status_for(ErrorCode code);

/// Entry point shared by the `tcn` binary and the tests. Errors are reported on `err` as a
/// single line "error: <Category>: <message>".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Ranked proposal file: one JSON object per line,
///   {"video_id":..., "begin":..., "end":..., "score":..., "position":..., "scale":...}
/// in rank order within each video.
void write_proposals(std::ostream& out, const std::string& video_id, std::span<const Proposal> ranked);
RankedProposals read_proposals(std::istream& in);

/// Detection file: one JSON object per line,
///   {"video_id":..., "begin":..., "end":..., "class_id":..., "class_name":..., "score":...}
void write_detections(std::ostream& out, std::span<const Detection> detections,
                      const DatasetManifest& manifest);
std::vector<Detection> read_detections(std::istream& in);

}  // namespace tcn::cli
