#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsgrasp {

enum class ErrorCode {
  kMalformedRotation,
  kDegenerateRectangle,
  kEmptyInput,
  kUnknownImageId,
  kNoValidWindow,
  kWindowOutOfRange,
  kInsufficientPoses,
  kLengthMismatch,
  kInvalidArgument,
  kMalformedAnnotation,
  kInvalidConfig,
  kIo,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRotation: return "malformed-rotation";
    case ErrorCode::kDegenerateRectangle: return "degenerate-rectangle";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kUnknownImageId: return "unknown-image-id";
    case ErrorCode::kNoValidWindow: return "no-valid-window";
    case ErrorCode::kWindowOutOfRange: return "window-out-of-range";
    case ErrorCode::kInsufficientPoses: return "insufficient-poses";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kMalformedAnnotation: return "malformed-annotation";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vsgrasp
