#include "armwatch/error.hpp"

namespace armwatch {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::kNegativeTime: return "NEGATIVE_TIME";
    case ErrorCode::kMalformedFile: return "MALFORMED_FILE";
    case ErrorCode::kBadTripleCount: return "BAD_TRIPLE_COUNT";
    case ErrorCode::kZeroVector: return "ZERO_VECTOR";
    case ErrorCode::kBadWindow: return "BAD_WINDOW";
    case ErrorCode::kInvalidScript: return "INVALID_SCRIPT";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kNoInput: return "NO_INPUT";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace armwatch
