#pragma once

#include <stdexcept>
#include <string>

namespace ostrovsky {

enum class ErrorCode {
  NonPowerOfTwo,
  NonPositiveLength,
  NonZeroMean,
  OmegaOutOfRange,
  GridMismatch,
  ConstraintViolated,
  DegenerateProfile,
  InvalidExponent,
  BadEpsilon,
  BadAlpha,
  NoConvergence,
  Diverged,
  InsufficientSamples,
  NotConverged,
  WindowTooNoisy,
  WindowTooSmall,
  BadN,
  EigenFailure,
  KernelContamination,
  SolveFailure,
  BlowupDetected,
  BadDelta,
  ResolutionLimit,
  Usage
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ostrovsky
