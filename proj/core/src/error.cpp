#include "inls/error.hpp"

namespace inls {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::BOutOfRange: return "BOutOfRange";
    case ErrorCode::SigmaNotIntercritical: return "SigmaNotIntercritical";
    case ErrorCode::CouplingBelowHardy: return "CouplingBelowHardy";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::MissingGroundState: return "MissingGroundState";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NegativeProfile: return "NegativeProfile";
    case ErrorCode::ScaleOutOfRange: return "ScaleOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::CutoffInfeasible: return "CutoffInfeasible";
    case ErrorCode::InsufficientSnapshots: return "InsufficientSnapshots";
    case ErrorCode::MissingVariance: return "MissingVariance";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
    case ErrorCode::CacheMiss: return "CacheMiss";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::LinearSolveFailed: return "LinearSolveFailed";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace inls
