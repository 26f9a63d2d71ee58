#pragma once

#include <stdexcept>
#include <string>

namespace qquery {

// Violated precondition (dimension mismatch, out-of-range argument, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A requested dimension exceeds the simulator's budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed (non-convergence, rank deficiency).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qquery
