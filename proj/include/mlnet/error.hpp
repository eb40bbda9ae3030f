#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlnet {

/// Machine-readable failure categories. The CLI prints these as
/// `ERROR <code>: <message>`.
enum class ErrorCode {
  InvalidArgument,
  ParseError,
  UnknownLayer,
  UnknownNode,
  SelfExposure,
  NegativeAmount,
  NonFinite,
  EmptyNetwork,
  MismatchedNodes,
  MismatchedBanks,
  CapitalsIncomplete,
  NonConvergence,
  ZeroMatrix,
  DivergentAttenuation,
  Unstabilizable,
  FixedPointDivergence,
  UnstableStep,
  ConstantFactor,
  Underdetermined,
  SolverFailure,
  UnsupportedFormat,
  IoError,
  OutputExists,
};

std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlnet
