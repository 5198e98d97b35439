#pragma once

#include <stdexcept>

namespace quatmark {

// Malformed files, unparsable headers, empty or ill-shaped inputs.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands whose shapes do not conform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematically undefined values (inverse of zero, NC of a zero vector).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A caller-side precondition was violated (e.g. Givens with x2 = 0).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Payload larger than the host can carry.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal postcondition failed; indicates a bug, not bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace quatmark
