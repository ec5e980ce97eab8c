#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mocomp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// An explicit time step produced a non-finite or non-admissible value.
class StepDiverged : public Error {
 public:
  StepDiverged(const std::string& what, std::size_t pixel)
      : Error(what + " (pixel " + std::to_string(pixel) + ")"), pixel_(pixel) {}
  std::size_t pixel() const noexcept { return pixel_; }

 private:
  std::size_t pixel_;
};

/// Linear solve missed its residual target.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class InversionFailed : public Error {
 public:
  using Error::Error;
};

/// Config text could not be parsed; carries the 1-based line and offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string key = {})
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Missing or malformed data file.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace mocomp
