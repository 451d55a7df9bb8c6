#pragma once

#include <stdexcept>
#include <string>

namespace arcroll {

// Solver-side failures. Input validation uses std::invalid_argument /
// std::domain_error; these types mean the inputs were well formed but the
// requested solution does not exist.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoStableEquilibrium : SolverError {
  using SolverError::SolverError;
};

struct InfeasibleContact : SolverError {
  using SolverError::SolverError;
};

struct DegenerateContact : SolverError {
  using SolverError::SolverError;
};

struct ScheduleStateMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyMap : SolverError {
  using SolverError::SolverError;
};

struct NoBoundaryInRange : SolverError {
  using SolverError::SolverError;
};

struct UnreachableState : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NoImpactDetected : SolverError {
  using SolverError::SolverError;
};

struct InsufficientOverlap : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// CSV structural problems carry the 1-based line number of the first offender.
struct CsvError : std::invalid_argument {
  CsvError(const std::string& kind, std::size_t line, const std::string& detail)
      : std::invalid_argument(kind + " at line " + std::to_string(line) +
                              (detail.empty() ? "" : ": " + detail)),
        kind(kind),
        line(line) {}
  std::string kind;
  std::size_t line;
};

struct MissingHeader : CsvError {
  explicit MissingHeader(std::size_t line, const std::string& detail = "")
      : CsvError("MissingHeader", line, detail) {}
};

struct NonMonotonicTime : CsvError {
  explicit NonMonotonicTime(std::size_t line, const std::string& detail = "")
      : CsvError("NonMonotonicTime", line, detail) {}
};

struct BadFieldCount : CsvError {
  explicit BadFieldCount(std::size_t line, const std::string& detail = "")
      : CsvError("BadFieldCount", line, detail) {}
};

}  // namespace arcroll
