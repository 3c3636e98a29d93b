#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace inls {

enum class ErrorCode {
  DimensionTooSmall,
  BOutOfRange,
  SigmaNotIntercritical,
  CouplingBelowHardy,
  InvalidResolution,
  SizeMismatch,
  ZeroField,
  MissingGroundState,
  NoConvergence,
  NegativeProfile,
  ScaleOutOfRange,
  ConfigInvalid,
  CutoffInfeasible,
  InsufficientSnapshots,
  MissingVariance,
  EmptyTrajectory,
  ConfigParseError,
  CacheMiss,
  IoError,
  LinearSolveFailed,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace inls
