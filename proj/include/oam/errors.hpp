#pragma once

#include <stdexcept>
#include <string>

namespace oam {

// Exceptions are grouped by the exit code the CLI maps them to:
// ConfigError -> 2, NumericError -> 3, DomainError -> 4.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatchError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InvalidGridError : public NumericError {
 public:
  using NumericError::NumericError;
};

class UndersampledWaistError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ZeroPowerError : public NumericError {
 public:
  using NumericError::NumericError;
};

class CenterOutOfGridError : public NumericError {
 public:
  using NumericError::NumericError;
};

class MissingSeedError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class BandOutsideTableError : public NumericError {
 public:
  using NumericError::NumericError;
};

class UnreachableEfficiencyError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace oam
