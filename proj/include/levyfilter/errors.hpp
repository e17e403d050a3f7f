#pragma once

#include <stdexcept>
#include <string>

namespace levyfilter {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a tabulated range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or iteration failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not defined for this configuration.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Filter collapsed: total mass or all weights underflowed.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Path simulation produced a non-finite value.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::size_t step)
      : Error(what + " at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Configuration text rejected; carries the offending key and line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& msg)
      : Error((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
              key + ": " + msg),
        key_(key),
        line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

}  // namespace levyfilter
