#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

/// Failure categories shared by every module. The C API maps these one-to-one
/// onto `selfsim_status` values, so the numbering is part of the ABI.
enum class ErrorCode : int {
  Ok = 0,
  OutOfRange = 1,
  Domain = 2,
  StepSizeUnderflow = 3,
  NoZeroWithinHorizon = 4,
  RootBracketFailure = 5,
  GridMismatch = 6,
  BracketFailure = 7,
  BisectionStall = 8,
  NoPlateau = 9,
  WindowTooShort = 10,
  NonMonotoneInitialData = 11,
  TimestepUnderflow = 12,
  MaxStepsExceeded = 13,
  InsufficientDecay = 14,
  BadExtinctionTime = 15,
  Io = 16,
  InvalidArgument = 17,
  Internal = 18,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selfsim
