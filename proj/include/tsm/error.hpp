#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsm {

enum class ErrorCode {
  // core_types
  OverlappingSegments,
  OutOfRange,
  NonPositiveTarget,
  // spectral
  LengthTooSmall,
  NotPowerOfTwo,
  SignalShorterThanWindow,
  EmptyFrames,
  // stretchers
  SignalTooShort,
  LengthMismatch,
  TooFewBins,
  SegmentTooShortForAlgo,
  // metrics
  ZeroEnergyOutput,
  SampleRateMismatch,
  // audio_io
  UnsupportedFormat,
  CorruptHeader,
  Io,
  SyntaxError,
  MissingField,
  InvalidValue,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OverlappingSegments: return "OverlappingSegments";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonPositiveTarget: return "NonPositiveTarget";
    case ErrorCode::LengthTooSmall: return "LengthTooSmall";
    case ErrorCode::NotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorCode::SignalShorterThanWindow: return "SignalShorterThanWindow";
    case ErrorCode::EmptyFrames: return "EmptyFrames";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewBins: return "TooFewBins";
    case ErrorCode::SegmentTooShortForAlgo: return "SegmentTooShortForAlgo";
    case ErrorCode::ZeroEnergyOutput: return "ZeroEnergyOutput";
    case ErrorCode::SampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::Io: return "Io";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::InvalidValue: return "InvalidValue";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the failure kind;
/// the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  bool is_io() const noexcept { return code_ == ErrorCode::Io; }

 private:
  ErrorCode code_;
};

}  // namespace tsm
