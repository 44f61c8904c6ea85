#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcn {

/// Error categories raised by the library. The CLI maps each one to an exit status.
enum class ErrorCode {
  kInvalidConfig,
  kConfigError,
  kEmptyAfterClamp,
  kEmptySegment,
  kDimensionMismatch,
  kShapeError,
  kStateError,
  kNoPositives,
  kNoNegatives,
  kNoGroundTruth,
  kParseError,
  kValidationError,
  kBadMagic,
  kTruncatedFile,
  kDimOverflow,
  kIoError,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tcn
