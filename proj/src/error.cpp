#include "ostrovsky/error.hpp"

namespace ostrovsky {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPowerOfTwo: return "NonPowerOfTwo";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::NonZeroMean: return "NonZeroMean";
    case ErrorCode::OmegaOutOfRange: return "OmegaOutOfRange";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::DegenerateProfile: return "DegenerateProfile";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::BadEpsilon: return "BadEpsilon";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::WindowTooNoisy: return "WindowTooNoisy";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::BadN: return "BadN";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::KernelContamination: return "KernelContamination";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::BlowupDetected: return "BlowupDetected";
    case ErrorCode::BadDelta: return "BadDelta";
    case ErrorCode::ResolutionLimit: return "ResolutionLimit";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ostrovsky
