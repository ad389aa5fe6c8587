#pragma once

#include <stdexcept>

namespace wirehead {

// Malformed caller input: bad indices, invalid probabilities, ill-formed
// fixtures or configs, operations invoked out of contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation produced or received a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exact computation would exceed its configured budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wirehead
