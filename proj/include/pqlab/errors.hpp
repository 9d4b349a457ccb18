#pragma once

#include <stdexcept>
#include <string>

namespace pqlab {

// A precondition on caller-supplied parameters failed.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A configured desk-scale cap (sample count, tuple space, search size) was exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant did not hold. Always indicates a bug upstream.
class InvariantBreach : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pqlab
