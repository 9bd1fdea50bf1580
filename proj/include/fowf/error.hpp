#pragma once

#include <stdexcept>
#include <string>

namespace fowf {

/// Base of every error raised by the library. The `module()` tag names the
/// subsystem that raised it so the harness can report context.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Invalid configuration or parameter set.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Division by a vanishing quantity (e.g. aerodynamic torque at zero speed).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Time integration produced a non-finite state.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Trim, Riccati or other iterative solver failed.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fowf
