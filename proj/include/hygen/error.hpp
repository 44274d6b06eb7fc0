#pragma once

#include <stdexcept>
#include <string>

namespace hygen {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NegativeEntry,
  NonFiniteEntry,
  AsymmetricAffinity,
  InvalidMaxSize,
  InvalidKappa,
  NodeOutOfRange,
  InvalidHyperedgeSize,
  ZeroExpectation,
  ZeroDensityHyperedge,
  EmptyConfiguration,
  ConvergenceFailure,
  SizeGuardExceeded,
  ZeroMembership,
  MalformedInput,
  DuplicateNodeInHyperedge,
  NonPositiveWeight,
  Io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::AsymmetricAffinity: return "AsymmetricAffinity";
    case ErrorCode::InvalidMaxSize: return "InvalidMaxSize";
    case ErrorCode::InvalidKappa: return "InvalidKappa";
    case ErrorCode::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorCode::InvalidHyperedgeSize: return "InvalidHyperedgeSize";
    case ErrorCode::ZeroExpectation: return "ZeroExpectation";
    case ErrorCode::ZeroDensityHyperedge: return "ZeroDensityHyperedge";
    case ErrorCode::EmptyConfiguration: return "EmptyConfiguration";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SizeGuardExceeded: return "SizeGuardExceeded";
    case ErrorCode::ZeroMembership: return "ZeroMembership";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DuplicateNodeInHyperedge: return "DuplicateNodeInHyperedge";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Power iteration did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(ErrorCode::ConvergenceFailure, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace hygen
