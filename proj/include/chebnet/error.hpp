#pragma once

#include <stdexcept>
#include <string>

namespace chebnet {

/// Raised when caller-supplied data violates a precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a computation produces non-finite or otherwise unusable numbers.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chebnet
