#pragma once

#include <stdexcept>
#include <string>

namespace absorb {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- input / validation failures (CLI exit code 2) ---

struct ParseError : Error {
  using Error::Error;
};

enum class ModelFault {
  RowMassViolation,
  AbsorbingSetNotClosed,
  UnknownState,
  EmptyActionSet,
  BadInitialDistribution,
};

const char* to_string(ModelFault fault);

struct InvalidModel : Error {
  ModelFault fault;
  InvalidModel(ModelFault f, const std::string& msg)
      : Error(std::string(to_string(f)) + ": " + msg), fault(f) {}
};

struct PolicyMismatch : Error {
  using Error::Error;
};

struct SupportViolation : Error {
  using Error::Error;
};

struct BadParameter : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// --- analysis failures: the question was well-posed but has no answer
// of the requested kind (CLI exit code 3) ---

struct AnalysisError : Error {
  using Error::Error;
};

struct NonAbsorbing : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct NotASolution : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct NoConvergence : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct EmptyFamily : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct NotDecreasing : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct InfeasibleProblem : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct UnboundedProblem : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct AllCensored : AnalysisError {
  using AnalysisError::AnalysisError;
};

// --- numerical breakdowns (CLI exit code 4) ---

struct NumericalError : Error {
  using Error::Error;
};

struct SingularSystem : NumericalError {
  using NumericalError::NumericalError;
};

struct LpNumericalFailure : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace absorb
