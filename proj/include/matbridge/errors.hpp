#pragma once

#include <stdexcept>
#include <string>

namespace matbridge {

// Error categories map 1:1 onto the CLI exit codes:
//   1 configuration, 2 I/O, 3 compatibility, 4 numeric failure.
class Error : public std::runtime_error {
 public:
  Error(std::string message, int exit_code)
      : std::runtime_error(std::move(message)), exit_code_(exit_code) {}

  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

// Bad parameter values, inconsistent sizes requested by the caller.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::string message) : Error(std::move(message), 1) {}
};

// Dimension mismatch between containers that must agree.
class ShapeError : public ConfigError {
 public:
  explicit ShapeError(std::string message) : ConfigError(std::move(message)) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public ConfigError {
 public:
  explicit DomainError(std::string message) : ConfigError(std::move(message)) {}
};

// Input data violates a declared validity range.
class ValidationError : public ConfigError {
 public:
  explicit ValidationError(std::string message) : ConfigError(std::move(message)) {}
};

// Filesystem-level failure: unreadable, unwritable, missing.
class IoError : public Error {
 public:
  explicit IoError(std::string message) : Error(std::move(message), 2) {}
};

// File exists but its contents do not parse.
class ParseError : public Error {
 public:
  explicit ParseError(std::string message) : Error(std::move(message), 2) {}
};

// Well-formed artifacts that do not fit together (model vs dataset schema).
class CompatibilityError : public Error {
 public:
  explicit CompatibilityError(std::string message) : Error(std::move(message), 3) {}
};

class SchemaError : public CompatibilityError {
 public:
  explicit SchemaError(std::string message) : CompatibilityError(std::move(message)) {}
};

// Non-finite values produced at runtime, or a metric whose formula divides by zero.
class NumericError : public Error {
 public:
  explicit NumericError(std::string message) : Error(std::move(message), 4) {}
};

class UndefinedMetricError : public NumericError {
 public:
  explicit UndefinedMetricError(std::string message) : NumericError(std::move(message)) {}
};

}  // namespace matbridge
