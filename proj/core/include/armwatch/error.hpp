#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace armwatch {

enum class ErrorCode {
  kLengthMismatch,
  kNegativeTime,
  kMalformedFile,
  kBadTripleCount,
  kZeroVector,
  kBadWindow,
  kInvalidScript,
  kInvalidConfig,
  kNoInput,
};

// Stable upper-case name, e.g. "BAD_TRIPLE_COUNT".
std::string_view to_string(ErrorCode code);

// All library failures are reported as armwatch::Error; the code lets callers
// branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // what() without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace armwatch
