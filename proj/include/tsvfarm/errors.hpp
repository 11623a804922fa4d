#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tsvfarm {

/// A located problem in an input file or model.
struct Diagnostic {
  int line = 0;  // 0 when not tied to a source line
  std::string message;
};

/// Malformed input: syntax, units, unresolved references, invariant
/// violations. Maps to CLI exit status 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(std::vector<Diagnostic> diagnostics);
  explicit DataError(const std::string& message);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Argument outside the mathematical domain of an operation (zero area,
/// non-positive conductivity, empty region, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thermal solve failed. Maps to CLI exit status 2.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& message, double residual, int iterations)
      : std::runtime_error(message), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// The network has no conductive path to ambient.
class SingularSystemError : public SolverError {
 public:
  explicit SingularSystemError(const std::string& message) : SolverError(message, 0.0, 0) {}
};

/// Leakage/temperature fixed point diverged.
class ThermalRunawayError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Grid does not tile the footprint, bad option values.
class ConfigError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace tsvfarm
