#pragma once

#include <stdexcept>
#include <string>

namespace dualiscope {

// Error taxonomy. Validation failures throw one of these; diagnostic
// routines (validate_kernel, detailed_balance_violation, ...) return
// findings instead of throwing.

struct InvalidMove : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidPairing : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidDual : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A theorem hypothesis does not hold (e.g. a non-positive-definite test
// function handed to the comparison check). The CLI maps this to exit 2.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// State-space or occupancy guard exceeded.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dualiscope
