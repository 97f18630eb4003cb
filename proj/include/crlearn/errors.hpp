#pragma once

#include <stdexcept>
#include <string>

namespace crlearn {

// Machine-readable failure categories. The CLI maps these to its exit
// diagnostics, so the names are part of the external contract.
enum class ErrorCode {
  DomainError,
  LengthMismatch,
  InfeasibleBase,
  NoConvergence,
  NoFeasibleBeta,
  EmptyReplications,
  EmptyMask,
  DegenerateRow,
  BadBlockLen,
  BadTheta,
  ExternalFailure,
  ParseError,
  NonFiniteValue,
  InitialPointInfeasible,
  InvalidConfig,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crlearn
