#pragma once

#include <stdexcept>
#include <string>

namespace bpfv {

/// Invalid user-facing configuration (mesh too small, unknown preset, ...).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A documented precondition of an operation was violated by its caller.
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

/// Non-finite values, solver non-convergence, or a broken internal invariant.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bpfv
