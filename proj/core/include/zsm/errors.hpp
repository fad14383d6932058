#pragma once

#include <stdexcept>
#include <string>

namespace zsm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arithmetic on multiset counts left the representable range.
struct OverflowError : Error {
  using Error::Error;
};

// A bounded search (state space, unfolding, enumeration) hit its cap
// before producing a conclusive answer.
struct BudgetExceededError : Error {
  using Error::Error;
};

struct NotEnabledError : Error {
  using Error::Error;
};

struct InvalidSequenceError : Error {
  using Error::Error;
};

struct ShapeViolationError : Error {
  using Error::Error;
};

}  // namespace zsm
