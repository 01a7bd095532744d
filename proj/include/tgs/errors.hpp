#pragma once

#include <stdexcept>
#include <string>

namespace tgs {

// Thrown when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Signals an all-zero weight vector; callers decide the fallback.
class DegenerateWeightsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tgs
