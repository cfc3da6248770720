#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tees {

enum class ErrorCode {
  ParseError,
  NonUniformStep,
  EmptySeries,
  IncompatibleStep,
  NegativeScale,
  MissingCounts,
  ZeroSectorConnections,
  InvalidConfig,
  OutOfRange,
  DegenerateFit,
  SimultaneousChargeDischarge,
  PartialDay,
  WindowMismatch,
  Infeasible,
  SolverTimeout,
  NumericalFailure,
  PeakExceedsCatalog,
  UnknownSize,
  ZeroSales,
  MissingBaseline,
  LengthMismatch,
  TooFewPathways,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tees
