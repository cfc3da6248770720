#include "tees/error.hpp"

namespace tees {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonUniformStep: return "NonUniformStep";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::IncompatibleStep: return "IncompatibleStep";
    case ErrorCode::NegativeScale: return "NegativeScale";
    case ErrorCode::MissingCounts: return "MissingCounts";
    case ErrorCode::ZeroSectorConnections: return "ZeroSectorConnections";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::SimultaneousChargeDischarge: return "SimultaneousChargeDischarge";
    case ErrorCode::PartialDay: return "PartialDay";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::SolverTimeout: return "SolverTimeout";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::PeakExceedsCatalog: return "PeakExceedsCatalog";
    case ErrorCode::UnknownSize: return "UnknownSize";
    case ErrorCode::ZeroSales: return "ZeroSales";
    case ErrorCode::MissingBaseline: return "MissingBaseline";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPathways: return "TooFewPathways";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tees
