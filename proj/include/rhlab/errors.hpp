#pragma once

#include <stdexcept>
#include <string>

namespace rhlab {

enum class ErrorKind { config, degenerate, solver, hypothesis };

/// Base of every error raised by the library. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Input that is well-formed but carries no information (zero field, empty domain).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what) : Error(ErrorKind::degenerate, what) {}
};

/// A hypothesis of the reverse Hölder theorem (or of an inequality it relies on) fails.
class HypothesisError : public Error {
 public:
  explicit HypothesisError(const std::string& what) : Error(ErrorKind::hypothesis, what) {}
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double final_residual)
      : Error(ErrorKind::solver, what), final_residual_(final_residual) {}
  double final_residual() const noexcept { return final_residual_; }

 private:
  double final_residual_;
};

/// Raised when a non-symmetric operator exposes a complex eigenvalue pair.
class UnsupportedSpectrumError : public SolverError {
 public:
  UnsupportedSpectrumError(const std::string& what, double final_residual)
      : SolverError(what, final_residual) {}
};

/// CLI exit code: 2 config, 3 solver, 4 hypothesis violation.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::degenerate:
      return 2;
    case ErrorKind::solver:
      return 3;
    case ErrorKind::hypothesis:
      return 4;
  }
  return 1;
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return "config";
    case ErrorKind::degenerate:
      return "degenerate-input";
    case ErrorKind::solver:
      return "solver";
    case ErrorKind::hypothesis:
      return "hypothesis-violation";
  }
  return "unknown";
}

}  // namespace rhlab
